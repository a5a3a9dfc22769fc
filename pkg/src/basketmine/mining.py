"""Vertical bitmap index and Apriori frequent-itemset mining.

Every item (real or virtual) owns one presence bitmap over the baskets,
packed into ``uint64`` words.  The support of an itemset is the popcount
of the AND of its members' bitmaps, so a whole block of candidates is
counted with a handful of vectorised numpy operations.

:func:`brute_force_frequent` enumerates itemsets directly from the
baskets and exists purely to cross-check :func:`apriori`.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

__all__ = [
    "MiningParams",
    "BitmapIndex",
    "FrequentItemsetTable",
    "build_index",
    "support_count",
    "candidate_join_prune",
    "apriori",
    "brute_force_frequent",
    "BRUTE_FORCE_MAX_ITEMS",
]

BRUTE_FORCE_MAX_ITEMS = 20
_BLOCK = 2048


def _basket_items(basket):
    # Basket objects carry real + virtual items; plain iterables are taken as-is
    items = getattr(basket, "all_items", None)
    return frozenset(basket if items is None else items)


@dataclass(frozen=True)
class MiningParams:
    """Mining thresholds.

    ``min_support`` is an absolute basket count when given as an ``int``
    and a fraction of all baskets when given as a ``float``.  A fraction
    ``s`` admits itemsets with count >= ``ceil(s * n_baskets)``, using the
    decimal value of ``s`` so that ``0.1 * 10`` really means 1.
    """

    min_support: int | float = 1
    max_len: int = 3

    def __post_init__(self):
        s = self.min_support
        if isinstance(s, bool):
            raise TypeError("min_support must be an int count or a float fraction")
        if isinstance(s, int):
            if s < 1:
                raise ValueError(f"absolute min_support must be >= 1, got {s}")
        elif isinstance(s, float):
            if not 0.0 < s <= 1.0:
                raise ValueError(f"fractional min_support must be in (0, 1], got {s}")
        else:
            raise TypeError("min_support must be an int count or a float fraction")
        if isinstance(self.max_len, bool) or not isinstance(self.max_len, int) or self.max_len < 1:
            raise ValueError(f"max_len must be an integer >= 1, got {self.max_len!r}")

    def min_count(self, n_baskets):
        if isinstance(self.min_support, int):
            return self.min_support
        return max(1, math.ceil(Fraction(repr(self.min_support)) * n_baskets))


class BitmapIndex:
    """Column-major presence matrix: one packed bitmap per item.

    ``item_order`` is sorted, so column positions (and every output that
    iterates over them) are deterministic.  Instances are read-only after
    construction and safe to share between threads.
    """

    def __init__(self, n_baskets, item_order, bits):
        self.n_baskets = n_baskets
        self.item_order = tuple(item_order)
        self._pos = {item: i for i, item in enumerate(self.item_order)}
        self.bits = bits
        self.bits.flags.writeable = False
        self._counts = np.bitwise_count(bits).sum(axis=1, dtype=np.int64)

    def __len__(self):
        return len(self.item_order)

    def __contains__(self, item):
        return item in self._pos

    def __repr__(self):
        return f"BitmapIndex(n_baskets={self.n_baskets}, n_items={len(self)})"

    def position(self, item):
        try:
            return self._pos[item]
        except KeyError:
            raise KeyError(f"item {item!r} is not in the index") from None

    def count(self, item):
        return int(self._counts[self.position(item)])

    def bitmap(self, item):
        """Unpacked presence vector (bool, one entry per basket)."""
        row = self.bits[self.position(item)]
        unpacked = np.unpackbits(row.view(np.uint8), bitorder="little")
        return unpacked[: self.n_baskets].astype(bool)

    def positions(self, itemsets):
        """(n, k) int array of column positions for same-size itemsets."""
        return np.array([[self.position(i) for i in s] for s in itemsets], dtype=np.intp)

    def count_positions(self, pos):
        """Support counts for rows of ``pos`` (each row one itemset)."""
        pos = np.asarray(pos, dtype=np.intp)
        if pos.size == 0:
            return np.zeros(0, dtype=np.int64)
        acc = self.bits[pos[:, 0]]
        for c in range(1, pos.shape[1]):
            acc = acc & self.bits[pos[:, c]]
        return np.bitwise_count(acc).sum(axis=1, dtype=np.int64)


def build_index(baskets) -> BitmapIndex:
    baskets = [_basket_items(b) for b in baskets]
    if not baskets:
        raise ValueError("cannot index an empty basket list")
    item_order = sorted(set().union(*baskets))
    pos = {item: i for i, item in enumerate(item_order)}
    n = len(baskets)
    n_words = (n + 63) // 64
    rows, cols = [], []
    for j, items in enumerate(baskets):
        for item in items:
            rows.append(pos[item])
            cols.append(j)
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.uint64)
    bits = np.zeros((len(item_order), n_words), dtype=np.uint64)
    np.bitwise_or.at(
        bits,
        (rows, (cols >> np.uint64(6)).astype(np.intp)),
        np.left_shift(np.uint64(1), cols & np.uint64(63)),
    )
    return BitmapIndex(n, item_order, bits)


def support_count(index: BitmapIndex, itemset) -> int:
    """Number of baskets containing every item of ``itemset``."""
    itemset = tuple(itemset)
    if not itemset:
        return index.n_baskets
    pos = [index.position(i) for i in itemset]
    return int(index.count_positions(np.asarray([pos]))[0])


def candidate_join_prune(frequent_k) -> list[tuple]:
    """Apriori candidate generation from frequent ``k``-itemsets.

    Pairs sharing their first ``k-1`` items are merged; a merged candidate
    survives only if all of its ``k``-subsets are in ``frequent_k``.
    """
    level = sorted({tuple(s) for s in frequent_k})
    if not level:
        return []
    k = len(level[0])
    if any(len(s) != k for s in level):
        raise ValueError("candidate_join_prune needs itemsets of a single size")
    frequent = set(level)
    out = []
    start = 0
    while start < len(level):
        prefix = level[start][:-1]
        end = start
        while end < len(level) and level[end][:-1] == prefix:
            end += 1
        block = level[start:end]
        for i, a in enumerate(block):
            for b in block[i + 1:]:
                cand = a + (b[-1],)
                if all(cand[:j] + cand[j + 1:] in frequent for j in range(k + 1)):
                    out.append(cand)
        start = end
    return out


@dataclass
class FrequentItemsetTable:
    """Frequent itemsets with their basket counts.

    Itemsets are sorted tuples of item identifiers.  Two tables compare
    equal when they hold the same itemsets with the same counts.
    """

    counts: dict = field(default_factory=dict)
    n_baskets: int = 0
    min_count: int = 1
    max_len: int = 3

    def __eq__(self, other):
        if not isinstance(other, FrequentItemsetTable):
            return NotImplemented
        return self.counts == other.counts

    def __len__(self):
        return len(self.counts)

    def __contains__(self, itemset):
        return tuple(itemset) in self.counts

    def __getitem__(self, itemset):
        return self.counts[tuple(itemset)]

    def __iter__(self):
        return iter(self.sorted_itemsets())

    def sorted_itemsets(self):
        return sorted(self.counts, key=lambda s: (len(s), s))

    def by_size(self):
        groups = {}
        for s in self.sorted_itemsets():
            groups.setdefault(len(s), {})[s] = self.counts[s]
        return groups

    def to_csv(self):
        """``items;count`` lines, items ``|``-joined, sorted by size then items."""
        buf = io.StringIO()
        buf.write("items;count\n")
        for s in self.sorted_itemsets():
            buf.write(f"{'|'.join(s)};{self.counts[s]}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = text.splitlines()
        if not lines or lines[0] != "items;count":
            raise ValueError("itemset CSV must start with 'items;count'")
        counts = {}
        for line in lines[1:]:
            if not line:
                continue
            items, count = line.rsplit(";", 1)
            counts[tuple(items.split("|"))] = int(count)
        return cls(counts=counts)


def _count_candidates(index, candidates, threads):
    if not candidates:
        return []
    pos = index.positions(candidates)
    blocks = [pos[i:i + _BLOCK] for i in range(0, len(pos), _BLOCK)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(index.count_positions, blocks))
    else:
        parts = [index.count_positions(b) for b in blocks]
    return np.concatenate(parts).tolist()


def apriori(index: BitmapIndex, params: MiningParams, threads: int = 1) -> FrequentItemsetTable:
    """Level-wise frequent-itemset search up to ``params.max_len`` items.

    ``threads`` splits support counting into candidate blocks; blocks are
    merged in submission order, so output is identical for any value.
    """
    t = params.min_count(index.n_baskets)
    counts = {}
    level = []
    for item in index.item_order:
        c = index.count(item)
        if c >= t:
            counts[(item,)] = c
            level.append((item,))
    k = 1
    while level and k < params.max_len:
        candidates = candidate_join_prune(level)
        level = []
        for cand, c in zip(candidates, _count_candidates(index, candidates, max(1, threads))):
            if c >= t:
                counts[cand] = c
                level.append(cand)
        k += 1
    return FrequentItemsetTable(counts, index.n_baskets, t, params.max_len)


def brute_force_frequent(baskets, params: MiningParams) -> FrequentItemsetTable:
    """Reference miner: enumerate every itemset and scan every basket."""
    baskets = [_basket_items(b) for b in baskets]
    if not baskets:
        raise ValueError("cannot mine an empty basket list")
    universe = sorted(set().union(*baskets))
    if len(universe) > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_ITEMS} distinct items, got {len(universe)}"
        )
    t = params.min_count(len(baskets))
    counts = {}
    for size in range(1, params.max_len + 1):
        for combo in combinations(universe, size):
            members = set(combo)
            c = sum(1 for b in baskets if members <= b)
            if c >= t:
                counts[combo] = c
    return FrequentItemsetTable(counts, len(baskets), t, params.max_len)
