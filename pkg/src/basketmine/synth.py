"""Synthetic POS corpora with planted association rules.

Randomness comes from SplitMix64 (see :mod:`basketmine._prng`), consumed
in a fixed layout so any implementation of the same algorithm reproduces
a corpus bit for bit.  Each basket *attempt* draws, in order:

1. ``n_items`` uniforms, item ``i`` present iff ``u < base_probability[i]``;
2. two uniforms per planted rule, in rule order: if the first is below
   ``antecedent_probability`` every antecedent item is forced in and the
   consequent's presence is reset to ``second < target_confidence``;
3. four demographic uniforms: gender, age, day, minute of day.

Attempts that end with no items are discarded and the next attempt is
used, so baskets are always nonempty.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from decimal import Decimal

import numpy as np

from ._prng import SplitMix64
from .dataset import PosRecord, group_into_baskets, write_pos_csv

__all__ = [
    "PlantedRule",
    "SynthSpec",
    "GroundTruth",
    "generate",
    "generate_records",
    "ground_truth_to_csv",
    "item_code",
    "write_corpus",
]

DEMOGRAPHIC_DRAWS = 4
N_CATEGORIES = 8


def item_code(i, n_items):
    width = max(3, len(str(n_items - 1)))
    return f"I{i:0{width}d}"


@dataclass(frozen=True)
class PlantedRule:
    antecedent: tuple
    consequent: int
    target_confidence: float
    antecedent_probability: float

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))


@dataclass(frozen=True)
class SynthSpec:
    """Corpus recipe.  Items are referred to by index ``0..n_items-1``."""

    n_baskets: int
    n_items: int
    base_probability: tuple | float = 0.05
    planted: tuple = ()
    female_share: float | None = 0.5
    age_range: tuple | None = (18, 79)
    start_date: date = date(2024, 1, 1)
    end_date: date = date(2024, 1, 31)
    seed: int = 0

    def __post_init__(self):
        if self.n_baskets < 1 or self.n_items < 1:
            raise ValueError("n_baskets and n_items must be positive")
        base = self.base_probability
        base = (float(base),) * self.n_items if np.isscalar(base) else tuple(float(p) for p in base)
        if len(base) != self.n_items:
            raise ValueError(f"need {self.n_items} base probabilities, got {len(base)}")
        object.__setattr__(self, "base_probability", base)
        planted = tuple(r if isinstance(r, PlantedRule) else PlantedRule(**r) for r in self.planted)
        object.__setattr__(self, "planted", planted)

        def prob(p, what):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{what} must be in [0, 1], got {p}")

        for i, p in enumerate(base):
            prob(p, f"base probability of item {i}")
        if sum(base) == 0 and not any(r.antecedent_probability > 0 for r in planted):
            raise ValueError("every basket would be empty: all probabilities are zero")
        for r in planted:
            prob(r.target_confidence, "target_confidence")
            prob(r.antecedent_probability, "antecedent_probability")
            for i in (*r.antecedent, r.consequent):
                if not 0 <= i < self.n_items:
                    raise ValueError(f"planted item {i} outside 0..{self.n_items - 1}")
            if not r.antecedent or r.consequent in r.antecedent:
                raise ValueError("planted rule needs a nonempty antecedent without its consequent")
            if r.target_confidence <= base[r.consequent]:
                raise ValueError(
                    f"target confidence {r.target_confidence} must exceed the consequent's "
                    f"base probability {base[r.consequent]}"
                )
        if self.female_share is not None:
            prob(self.female_share, "female_share")
        if self.age_range is not None:
            lo, hi = self.age_range
            if not 0 <= lo <= hi <= 130:
                raise ValueError(f"bad age_range {self.age_range}")
        if self.end_date < self.start_date:
            raise ValueError("end_date precedes start_date")

    @property
    def draws_per_attempt(self):
        return self.n_items + 2 * len(self.planted) + DEMOGRAPHIC_DRAWS

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        for key in ("start_date", "end_date"):
            if isinstance(data.get(key), str):
                data[key] = date.fromisoformat(data[key])
        if isinstance(data.get("base_probability"), list):
            data["base_probability"] = tuple(data["base_probability"])
        if isinstance(data.get("age_range"), list):
            data["age_range"] = tuple(data["age_range"])
        data["planted"] = tuple(PlantedRule(**r) for r in data.get("planted", ()))
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GroundTruth:
    antecedent: tuple
    consequent: str
    target_confidence: float
    antecedent_probability: float
    expected_antecedent_count: float
    expected_joint_count: float


def _attempts(spec, rng, n):
    """Presence matrix and demographic uniforms for ``n`` attempts."""
    u = rng.uniform(n * spec.draws_per_attempt).reshape(n, spec.draws_per_attempt)
    present = u[:, : spec.n_items] < np.asarray(spec.base_probability)
    col = spec.n_items
    for r in spec.planted:
        fire = u[:, col] < r.antecedent_probability
        keep = u[:, col + 1] < r.target_confidence
        present[np.ix_(fire, list(r.antecedent))] = True
        present[fire, r.consequent] = keep[fire]
        col += 2
    return present, u[:, col:]


def _records_for(spec, k, items, demo):
    u_gender, u_age, u_day, u_minute = demo
    if spec.female_share is None:
        gender = None
    else:
        gender = "F" if u_gender < spec.female_share else "M"
    if spec.age_range is None:
        age = None
    else:
        lo, hi = spec.age_range
        age = lo + int(u_age * (hi - lo + 1))
    n_days = (spec.end_date - spec.start_date).days + 1
    day = spec.start_date + timedelta(days=int(u_day * n_days))
    minute = int(u_minute * 1440)
    ts = datetime(day.year, day.month, day.day, minute // 60, minute % 60)
    rid = f"S{k + 1:07d}"
    out = []
    for i in items:
        code = item_code(i, spec.n_items)
        out.append(PosRecord(
            receipt_id=rid, timestamp=ts, gender=gender, age=age,
            item_code=code, item_name=f"Item {code[1:]}",
            category=f"Category {i % N_CATEGORIES}",
            quantity=1, unit_price=Decimal("100"),
        ))
    return out


def generate_records(spec: SynthSpec) -> list[PosRecord]:
    rng = SplitMix64(spec.seed)
    records = []
    made = 0
    while made < spec.n_baskets:
        need = spec.n_baskets - made
        present, demo = _attempts(spec, rng, need)
        for row, d in zip(present, demo):
            items = np.flatnonzero(row).tolist()
            if not items:
                continue
            records.extend(_records_for(spec, made, items, d))
            made += 1
            if made == spec.n_baskets:
                break
    return records


def generate(spec: SynthSpec):
    """``(baskets, ground_truth)`` for ``spec``; deterministic per seed.

    Expected counts in the ground truth cover forced antecedents only;
    natural co-occurrence from base probabilities comes on top.
    """
    return group_into_baskets(generate_records(spec)), _ground_truth(spec)


def _ground_truth(spec):
    return [
        GroundTruth(
            antecedent=tuple(sorted(item_code(i, spec.n_items) for i in r.antecedent)),
            consequent=item_code(r.consequent, spec.n_items),
            target_confidence=r.target_confidence,
            antecedent_probability=r.antecedent_probability,
            expected_antecedent_count=spec.n_baskets * r.antecedent_probability,
            expected_joint_count=spec.n_baskets * r.antecedent_probability * r.target_confidence,
        )
        for r in spec.planted
    ]


def ground_truth_to_csv(truth) -> str:
    buf = io.StringIO()
    buf.write("antecedent;consequent;target_confidence;antecedent_prob\n")
    for t in truth:
        buf.write(f"{'|'.join(t.antecedent)};{t.consequent};{t.target_confidence!r};{t.antecedent_probability!r}\n")
    return buf.getvalue()


def write_corpus(spec: SynthSpec, corpus_path, truth_path):
    records = generate_records(spec)
    write_pos_csv(records, corpus_path)
    truth = _ground_truth(spec)
    with open(truth_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(ground_truth_to_csv(truth))
    return records, truth
