"""POS ingestion, basket construction, virtual items and profiling.

A POS export is a flat CSV with one row per receipt line.  Rows sharing a
``receipt_id`` form one :class:`Basket`, which keeps only the *presence*
of each item code (quantities and prices are dropped at this stage).
Shopper and time attributes can be folded into the basket as virtual
items such as ``@gender=F`` or ``@dow=SAT`` so the miner treats them as
ordinary columns.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal, InvalidOperation
from typing import BinaryIO, Iterable, NamedTuple

from ._numfmt import percent, round_half_up

__all__ = [
    "CSV_HEADER",
    "VIRTUAL_PREFIX",
    "VIRTUAL_ATTRIBUTES",
    "PosParseError",
    "InvalidAgeError",
    "PosRecord",
    "Basket",
    "VirtualItemSpec",
    "ItemCatalog",
    "ProfileRow",
    "FrequencyRow",
    "parse_pos_csv",
    "read_pos_csv",
    "write_pos_csv",
    "group_into_baskets",
    "derive_virtual_items",
    "discretize_age",
    "build_catalog",
    "categorical_profile",
    "frequency_table",
]

log = logging.getLogger(__name__)

CSV_HEADER = (
    "receipt_id", "timestamp", "gender", "age", "item_code",
    "item_name", "category", "quantity", "unit_price",
)
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
VIRTUAL_PREFIX = "@"
VIRTUAL_ATTRIBUTES = frozenset({"gender", "day_of_week", "age_band"})
PROFILE_ATTRIBUTES = ("gender", "day_of_week", "age_band", "category")
DAY_CODES = ("MON", "TUE", "WED", "THU", "FRI", "SAT", "SUN")
GENDERS = ("F", "M")
MAX_AGE = 130


class PosParseError(ValueError):
    """A POS file could not be parsed; ``line`` is 1-based within the file."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidAgeError(ValueError):
    pass


@dataclass(frozen=True)
class PosRecord:
    receipt_id: str
    timestamp: datetime
    gender: str | None
    age: int | None
    item_code: str
    item_name: str
    category: str | None
    quantity: int
    unit_price: Decimal


@dataclass(frozen=True)
class Basket:
    """One cash receipt as a set of present items.

    ``gender`` is ``"F"``, ``"M"`` or ``None`` for unknown.  Virtual items
    live in their own set so real-item statistics never see them.
    """

    receipt_id: str
    timestamp: datetime | None
    gender: str | None
    age_band: str | None
    items: frozenset
    virtual_items: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))
        object.__setattr__(self, "virtual_items", frozenset(self.virtual_items))
        if not self.items:
            raise ValueError(f"basket {self.receipt_id!r} has no items")
        bad = [i for i in self.items if i.startswith(VIRTUAL_PREFIX)]
        if bad:
            raise ValueError(f"real item codes may not start with '@': {sorted(bad)}")
        bad = [v for v in self.virtual_items if not v.startswith(VIRTUAL_PREFIX)]
        if bad:
            raise ValueError(f"virtual items must start with '@': {sorted(bad)}")

    @property
    def all_items(self):
        return self.items | self.virtual_items


@dataclass(frozen=True)
class VirtualItemSpec:
    enabled_attributes: frozenset = frozenset()
    antecedent_only: bool = True

    def __post_init__(self):
        attrs = frozenset(self.enabled_attributes)
        unknown = attrs - VIRTUAL_ATTRIBUTES
        if unknown:
            raise ValueError(
                f"unknown virtual attribute(s) {sorted(unknown)}; "
                f"choose from {sorted(VIRTUAL_ATTRIBUTES)}"
            )
        object.__setattr__(self, "enabled_attributes", attrs)


@dataclass
class ItemCatalog:
    """item_code -> (item_name, category or None)."""

    entries: dict = field(default_factory=dict)

    def add(self, code, name, category=None):
        if not name:
            raise ValueError(f"item {code!r} has an empty name")
        if code in self.entries:
            return
        self.entries[code] = (name, category)

    def name(self, code):
        entry = self.entries.get(code)
        return entry[0] if entry else code

    def category(self, code):
        entry = self.entries.get(code)
        return entry[1] if entry else None

    def has_category(self, code):
        return self.category(code) is not None

    def __contains__(self, code):
        return code in self.entries

    def __len__(self):
        return len(self.entries)


class ProfileRow(NamedTuple):
    value: str
    count: int
    percent: Decimal


class FrequencyRow(NamedTuple):
    item: str
    count: int
    percent: Decimal


# ---------------------------------------------------------------------------
# Parsing


def _parse_row(lineno, row):
    if len(row) != len(CSV_HEADER):
        raise PosParseError(
            lineno, f"expected {len(CSV_HEADER)} columns, got {len(row)}"
        )
    receipt_id, ts, gender, age, code, name, category, qty, price = row
    if not receipt_id:
        raise PosParseError(lineno, "empty receipt_id")
    try:
        timestamp = datetime.strptime(ts, TIMESTAMP_FORMAT)
    except ValueError:
        raise PosParseError(lineno, f"unparsable timestamp {ts!r}") from None
    if gender not in ("", *GENDERS):
        raise PosParseError(lineno, f"gender must be F, M or empty, got {gender!r}")
    if age == "":
        age_value = None
    else:
        try:
            age_value = int(age)
        except ValueError:
            raise PosParseError(lineno, f"age is not an integer: {age!r}") from None
        if not 0 <= age_value <= MAX_AGE:
            raise PosParseError(lineno, f"age {age_value} outside [0, {MAX_AGE}]")
    if not code:
        raise PosParseError(lineno, "empty item_code")
    if code.startswith(VIRTUAL_PREFIX):
        raise PosParseError(lineno, f"item_code {code!r} uses the reserved '@' prefix")
    if not name:
        raise PosParseError(lineno, f"empty item_name for {code!r}")
    try:
        quantity = int(qty)
    except ValueError:
        raise PosParseError(lineno, f"quantity is not an integer: {qty!r}") from None
    if quantity < 1:
        raise PosParseError(lineno, f"quantity must be >= 1, got {quantity}")
    try:
        unit_price = Decimal(price)
    except InvalidOperation:
        raise PosParseError(lineno, f"unit_price is not a number: {price!r}") from None
    if not unit_price.is_finite() or unit_price < 0:
        raise PosParseError(lineno, f"unit_price must be >= 0, got {price!r}")
    return PosRecord(
        receipt_id=receipt_id,
        timestamp=timestamp,
        gender=gender or None,
        age=age_value,
        item_code=code,
        item_name=name,
        category=category or None,
        quantity=quantity,
        unit_price=unit_price,
    )


def parse_pos_csv(source: BinaryIO | bytes | str) -> list[PosRecord]:
    """Parse a POS export into records.

    ``source`` is a binary stream, raw bytes, or already-decoded text.
    The whole file is validated before anything is returned; the first
    problem raises :class:`PosParseError` with its line number.
    """
    if isinstance(source, str):
        text = source
    else:
        data = source if isinstance(source, bytes) else source.read()
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise PosParseError(1, f"input is not UTF-8 ({exc.reason})") from None

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise PosParseError(1, "missing header") from None
    if tuple(header) != CSV_HEADER:
        raise PosParseError(1, f"header must be {','.join(CSV_HEADER)!r}")

    records = []
    for row in reader:
        if not row:
            continue
        records.append(_parse_row(reader.line_num, row))
    return records


def read_pos_csv(path) -> list[PosRecord]:
    with open(path, "rb") as fh:
        return parse_pos_csv(fh)


def write_pos_csv(records: Iterable[PosRecord], path_or_stream):
    """Write records back out in the ingestion format."""
    own = isinstance(path_or_stream, (str, os.PathLike))
    fh = open(path_or_stream, "w", newline="", encoding="utf-8") if own else path_or_stream
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.receipt_id,
                r.timestamp.strftime(TIMESTAMP_FORMAT),
                r.gender or "",
                "" if r.age is None else r.age,
                r.item_code,
                r.item_name,
                r.category or "",
                r.quantity,
                r.unit_price,
            ])
    finally:
        if own:
            fh.close()


# ---------------------------------------------------------------------------
# Baskets and virtual items


def discretize_age(age: int) -> str:
    """Decade band, bottom-inclusive: 25 -> ``"20s"``, 7 -> ``"0s"``."""
    if isinstance(age, bool) or not isinstance(age, int):
        raise InvalidAgeError(f"age must be an integer, got {age!r}")
    if not 0 <= age <= MAX_AGE:
        raise InvalidAgeError(f"age {age} outside [0, {MAX_AGE}]")
    return f"{age // 10 * 10}s"


def group_into_baskets(records: Iterable[PosRecord], diagnostics: list | None = None) -> list[Basket]:
    """Collapse receipt lines into presence baskets.

    Baskets come out in order of first appearance.  Demographics are taken
    from the first line of each receipt; a receipt whose lines disagree on
    gender or age is dropped and a message is appended to ``diagnostics``
    (if given) and logged.
    """
    order = []
    heads = {}
    items = {}
    rejected = {}
    for rec in records:
        rid = rec.receipt_id
        if rid not in heads:
            heads[rid] = rec
            items[rid] = set()
            order.append(rid)
        head = heads[rid]
        if rid not in rejected and (rec.gender, rec.age) != (head.gender, head.age):
            rejected[rid] = (
                f"receipt {rid!r}: conflicting demographics "
                f"({head.gender}, {head.age}) vs ({rec.gender}, {rec.age})"
            )
        items[rid].add(rec.item_code)

    baskets = []
    for rid in order:
        if rid in rejected:
            log.warning(rejected[rid])
            if diagnostics is not None:
                diagnostics.append(rejected[rid])
            continue
        head = heads[rid]
        baskets.append(Basket(
            receipt_id=rid,
            timestamp=head.timestamp,
            gender=head.gender,
            age_band=None if head.age is None else discretize_age(head.age),
            items=frozenset(items[rid]),
        ))
    return baskets


def _virtual_items_for(basket, attributes):
    out = set()
    if "gender" in attributes and basket.gender is not None:
        out.add(f"@gender={basket.gender}")
    if "day_of_week" in attributes and basket.timestamp is not None:
        out.add(f"@dow={DAY_CODES[basket.timestamp.weekday()]}")
    if "age_band" in attributes and basket.age_band is not None:
        out.add(f"@age={basket.age_band}")
    return out


def derive_virtual_items(basket: Basket, spec: VirtualItemSpec) -> Basket:
    extra = _virtual_items_for(basket, spec.enabled_attributes)
    if extra <= basket.virtual_items:
        return basket
    return Basket(
        receipt_id=basket.receipt_id,
        timestamp=basket.timestamp,
        gender=basket.gender,
        age_band=basket.age_band,
        items=basket.items,
        virtual_items=basket.virtual_items | extra,
    )


# ---------------------------------------------------------------------------
# Profiling


def build_catalog(records: Iterable[PosRecord]) -> ItemCatalog:
    catalog = ItemCatalog()
    for rec in records:
        catalog.add(rec.item_code, rec.item_name, rec.category)
    return catalog


def _attribute_values(basket, attribute, catalog):
    if attribute == "gender":
        return [basket.gender] if basket.gender is not None else []
    if attribute == "day_of_week":
        return [DAY_CODES[basket.timestamp.weekday()]] if basket.timestamp else []
    if attribute == "age_band":
        return [basket.age_band] if basket.age_band is not None else []
    # category: one vote per distinct category present; uncategorised items
    # (newspapers, typically) are left out of the rollup
    cats = {catalog.category(i) for i in basket.items}
    cats.discard(None)
    return sorted(cats)


def categorical_profile(baskets, attribute, catalog: ItemCatalog | None = None) -> list[ProfileRow]:
    """Value distribution of a basket attribute.

    Percentages are taken over the baskets where the attribute is present
    and rounded half-up to two decimals.  For ``"category"`` a basket
    contributes once to each category it touches, so the denominator is
    the total number of (basket, category) incidences.
    """
    if attribute not in PROFILE_ATTRIBUTES:
        raise ValueError(
            f"unknown profile attribute {attribute!r}; choose from {PROFILE_ATTRIBUTES}"
        )
    if attribute == "category" and catalog is None:
        raise ValueError("category profile needs an ItemCatalog")
    counts = Counter()
    for b in baskets:
        counts.update(_attribute_values(b, attribute, catalog))
    total = sum(counts.values())
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ProfileRow(v, c, round_half_up(percent(c, total), 2)) for v, c in rows]


def frequency_table(baskets) -> list[FrequencyRow]:
    """Per-item basket counts, most frequent first (ties by item code)."""
    baskets = list(baskets)
    if not baskets:
        raise ValueError("frequency_table needs at least one basket")
    counts = Counter()
    for b in baskets:
        counts.update(b.items)
    n = len(baskets)
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [FrequencyRow(i, c, round_half_up(percent(c, n), 2)) for i, c in rows]
