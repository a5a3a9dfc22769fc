"""Independent reference computations used to derive expected values.

Nothing here imports the package's counting, rounding or metric code.
"""

import math
from fractions import Fraction
from itertools import combinations


def round_half_up(x, places):
    x = Fraction(x)
    scale = 10**places
    return Fraction(math.floor(x * scale + Fraction(1, 2)), scale)


def consistent_basket_totals(counts, printed_pcts, search=range(1, 100_000)):
    """Every N for which each count/N*100 rounds half-up to its printed percent."""
    targets = [Fraction(p) for p in printed_pcts]
    return [
        n for n in search
        if n >= max(counts)
        and all(round_half_up(Fraction(100 * c, n), 2) == t for c, t in zip(counts, targets))
    ]


def table2_row_solutions(instances=6, support="0.206", confidence=50, lift="486.5",
                         max_n=20_000):
    """(N, consequent_count, joint) triples reproducing a Table 2 row's print."""
    joint = Fraction(confidence, 100) * instances
    assert joint.denominator == 1
    joint = int(joint)
    out = []
    for n in range(instances, max_n):
        if round_half_up(Fraction(100 * instances, n), 3) != Fraction(support):
            continue
        for c in range(joint, n + 1):
            value = Fraction(joint, instances) / Fraction(c, n)
            if round_half_up(value, 1) == Fraction(lift):
                out.append((n, c, joint))
    return out


def count_containing(baskets, itemset):
    s = set(itemset)
    return sum(1 for b in baskets if s <= set(b))


def all_frequent(baskets, min_count, max_len):
    universe = sorted(set().union(*map(set, baskets)))
    out = {}
    for k in range(1, max_len + 1):
        for combo in combinations(universe, k):
            c = count_containing(baskets, combo)
            if c >= min_count:
                out[combo] = c
    return out


def next_level_oracle(frequent_k):
    """All (k+1)-sets whose k-subsets are all in ``frequent_k``."""
    frequent = {tuple(sorted(s)) for s in frequent_k}
    if not frequent:
        return []
    k = len(next(iter(frequent)))
    universe = sorted({i for s in frequent for i in s})
    return [
        combo for combo in combinations(universe, k + 1)
        if all(sub in frequent for sub in combinations(combo, k))
    ]


def pair_counts(baskets):
    out = {}
    for b in baskets:
        for a, c in combinations(sorted(set(b)), 2):
            out[(a, c)] = out.get((a, c), 0) + 1
    return out


def j_measure_exact_is_zero(n, instances, joint, consequent):
    return Fraction(joint, instances) == Fraction(consequent, n)


def binomial_3sigma(n, p):
    mu = n * p
    sd = math.sqrt(n * p * (1 - p))
    return mu - 3 * sd, mu + 3 * sd
