"""Association rules and their quality measures.

A rule ``A -> c`` has an itemset antecedent and a single-item consequent.
All measures derive from four integers: the basket total ``N``, the
antecedent count ``|T(A)|`` (reported as *instances*), the joint count
``|T(A u {c})|`` and the consequent count ``|T(c)|``.  Support,
confidence and lift are kept as exact fractions until they are printed.

J-measure (bits)::

    J = P(A) * [ p*log2(p/q) + (1-p)*log2((1-p)/(1-q)) ]
    p = P(c|A),  q = P(c),  0*log2(0/x) = 0

MDL (bits), where M is the number of items in the index, k = |A| and
e = |T(A)| - joint is the number of exceptions::

    log2(M * C(M-1, k))        which rule: consequent, then a k-subset
  + log2(|T(A)| + 1)           how many exceptions
  + log2(C(|T(A)|, e))         which covered baskets are the exceptions

Fewer MDL bits is better; every other measure is better when larger.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

from ._numfmt import fmt_fixed, fmt_trimmed
from .dataset import VIRTUAL_PREFIX
from .mining import BitmapIndex, FrequentItemsetTable, support_count

__all__ = [
    "MEASURES",
    "SUPPORT_MODES",
    "RULES_CSV_HEADER",
    "UndefinedMetricError",
    "Rule",
    "RuleMetrics",
    "RuleGenParams",
    "generate_rules",
    "compute_metrics",
    "metrics_from_counts",
    "rule_counts",
    "j_measure",
    "j_measure_from_counts",
    "mdl_score",
    "mdl_bits",
    "rank_rules",
    "rules_to_csv",
]

MEASURES = ("support", "confidence", "lift", "j_measure", "mdl")
SUPPORT_MODES = ("antecedent", "joint")
RULES_CSV_HEADER = "consequent;antecedent;instances;support_pct;confidence_pct;lift;j_bits;mdl_bits"


class UndefinedMetricError(ValueError):
    """A measure has a zero denominator for this rule."""


@dataclass(frozen=True, order=True)
class Rule:
    antecedent: tuple
    consequent: str

    def __post_init__(self):
        ante = tuple(sorted(set(self.antecedent)))
        if not ante:
            raise ValueError("rule antecedent must be nonempty")
        if self.consequent in ante:
            raise ValueError(f"consequent {self.consequent!r} also appears in the antecedent")
        object.__setattr__(self, "antecedent", ante)

    @property
    def items(self):
        return tuple(sorted(self.antecedent + (self.consequent,)))

    def __str__(self):
        return f"{'|'.join(self.antecedent)} => {self.consequent}"


@dataclass(frozen=True)
class RuleMetrics:
    n_baskets: int
    instances: int
    joint: int
    consequent_count: int
    j_measure_bits: float
    mdl_bits: float
    support_mode: str = "antecedent"

    @property
    def exceptions(self):
        return self.instances - self.joint

    @property
    def support_exact(self):
        num = self.instances if self.support_mode == "antecedent" else self.joint
        return Fraction(100 * num, self.n_baskets)

    @property
    def confidence_exact(self):
        return Fraction(100 * self.joint, self.instances)

    @property
    def lift_exact(self):
        return Fraction(self.joint * self.n_baskets, self.instances * self.consequent_count)

    @property
    def support_pct(self):
        return float(self.support_exact)

    @property
    def confidence_pct(self):
        return float(self.confidence_exact)

    @property
    def lift(self):
        return float(self.lift_exact)


@dataclass(frozen=True)
class RuleGenParams:
    """Rule generation settings.

    With ``max_rules`` set, candidates are ranked by J-measure and only
    the best ``max_rules`` are kept (generalised rule induction).
    """

    min_confidence: float = 0.5
    support_mode: str = "antecedent"
    virtual_antecedent_only: bool = True
    max_rules: int | None = None

    def __post_init__(self):
        if isinstance(self.min_confidence, bool) or not 0.0 < self.min_confidence <= 1.0:
            raise ValueError(f"min_confidence must be in (0, 1], got {self.min_confidence!r}")
        if self.support_mode not in SUPPORT_MODES:
            raise ValueError(f"support_mode must be one of {SUPPORT_MODES}, got {self.support_mode!r}")
        if self.max_rules is not None and self.max_rules < 0:
            raise ValueError("max_rules must be >= 0")


def _check_counts(n, instances, consequent):
    if instances == 0:
        raise UndefinedMetricError("antecedent never occurs: confidence undefined")
    if consequent == 0:
        raise UndefinedMetricError("consequent never occurs: lift undefined")
    if n <= 0:
        raise UndefinedMetricError("no baskets")


def j_measure_from_counts(n, instances, joint, consequent, strict=True):
    """J-measure in bits from raw counts.

    With ``strict`` the measure is refused when the consequent is in no
    basket or in every basket.  Without it the all-baskets case evaluates
    to its limit 0.
    """
    _check_counts(n, instances, consequent)
    if consequent == n:
        if strict:
            raise UndefinedMetricError("consequent in every basket: J-measure undefined")
        return 0.0
    if joint * n == instances * consequent:
        return 0.0
    p_a = instances / n
    p = joint / instances
    total = 0.0
    if joint:
        total += p * math.log2((joint * n) / (instances * consequent))
    if joint < instances:
        total += (1 - p) * math.log2(((instances - joint) * n) / (instances * (n - consequent)))
    return p_a * total


def mdl_bits(n_items, antecedent_size, instances, joint):
    """Description length of a rule plus its exceptions, in bits."""
    m, k = n_items, antecedent_size
    if not 1 <= k < m:
        raise ValueError(f"antecedent size {k} impossible with {m} items")
    if not 0 <= joint <= instances:
        raise ValueError("joint count must lie in [0, instances]")
    e = instances - joint
    # one log2 over the exact integer product keeps the score monotone in e
    return math.log2(m * math.comb(m - 1, k) * (instances + 1) * math.comb(instances, e))


def metrics_from_counts(n, instances, joint, consequent, n_items, antecedent_size,
                        support_mode="antecedent"):
    if support_mode not in SUPPORT_MODES:
        raise ValueError(f"support_mode must be one of {SUPPORT_MODES}, got {support_mode!r}")
    _check_counts(n, instances, consequent)
    return RuleMetrics(
        n_baskets=n,
        instances=instances,
        joint=joint,
        consequent_count=consequent,
        j_measure_bits=j_measure_from_counts(n, instances, joint, consequent, strict=False),
        mdl_bits=mdl_bits(n_items, antecedent_size, instances, joint),
        support_mode=support_mode,
    )


def rule_counts(rule, index, missing_ok=False):
    """``(instances, joint, consequent_count)`` for ``rule`` on ``index``.

    With ``missing_ok`` an item absent from the index counts as never
    occurring instead of raising :class:`KeyError`.
    """
    if missing_ok and any(i not in index for i in rule.items):
        instances = 0 if any(i not in index for i in rule.antecedent) else support_count(index, rule.antecedent)
        consequent = index.count(rule.consequent) if rule.consequent in index else 0
        return instances, 0, consequent
    instances = support_count(index, rule.antecedent)
    joint = support_count(index, rule.items)
    consequent = index.count(rule.consequent)
    return instances, joint, consequent


def compute_metrics(rule: Rule, index: BitmapIndex, support_mode="antecedent") -> RuleMetrics:
    instances, joint, consequent = rule_counts(rule, index)
    return metrics_from_counts(
        index.n_baskets, instances, joint, consequent,
        len(index), len(rule.antecedent), support_mode,
    )


def j_measure(rule: Rule, index: BitmapIndex) -> float:
    instances, joint, consequent = rule_counts(rule, index)
    return j_measure_from_counts(index.n_baskets, instances, joint, consequent)


def mdl_score(rule: Rule, index: BitmapIndex) -> float:
    instances, joint, _ = rule_counts(rule, index)
    return mdl_bits(len(index), len(rule.antecedent), instances, joint)


def generate_rules(table: FrequentItemsetTable, index: BitmapIndex, params: RuleGenParams = RuleGenParams()):
    """All single-consequent rules from the frequent itemsets.

    Returns ``(Rule, RuleMetrics)`` pairs sorted by antecedent then
    consequent, or ranked by J-measure when ``params.max_rules`` is set.
    Rules below ``min_confidence`` are dropped, as are rules whose
    consequent is a virtual item when ``virtual_antecedent_only`` is on.
    """
    unknown = sorted({i for s in table.counts for i in s if i not in index})
    if unknown:
        raise ValueError(f"itemset table mentions items absent from the index: {unknown[:5]}")
    threshold = Fraction(repr(params.min_confidence))
    n, m = index.n_baskets, len(index)

    def count(itemset):
        c = table.counts.get(itemset)
        return support_count(index, itemset) if c is None else c

    out = []
    for itemset in table.sorted_itemsets():
        if len(itemset) < 2:
            continue
        joint = table.counts[itemset]
        for c in itemset:
            if params.virtual_antecedent_only and c.startswith(VIRTUAL_PREFIX):
                continue
            ante = tuple(i for i in itemset if i != c)
            instances = count(ante)
            if joint < threshold * instances:
                continue
            metrics = metrics_from_counts(
                n, instances, joint, count((c,)), m, len(ante), params.support_mode
            )
            out.append((Rule(ante, c), metrics))
    if params.max_rules is not None:
        return rank_rules(out, "j_measure", params.max_rules)
    out.sort(key=lambda rm: rm[0])
    return out


def _sort_key(measure):
    if measure == "support":
        return lambda rm: (-rm[1].support_exact, rm[0])
    if measure == "confidence":
        return lambda rm: (-rm[1].confidence_exact, rm[0])
    if measure == "lift":
        return lambda rm: (-rm[1].lift_exact, rm[0])
    if measure == "j_measure":
        return lambda rm: (-rm[1].j_measure_bits, rm[0])
    if measure == "mdl":
        return lambda rm: (rm[1].mdl_bits, rm[0])
    raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")


def rank_rules(rules, measure, k=None):
    """Top ``k`` rules by ``measure`` (all of them when ``k`` is None).

    Larger is better except for ``"mdl"``.  Ties fall back to the rule's
    antecedent items, then its consequent, so the result does not depend
    on input order.
    """
    key = _sort_key(measure)
    if k is not None and k < 0:
        raise ValueError("k must be >= 0")
    ranked = sorted(rules, key=key)
    return ranked if k is None else ranked[:k]


def format_rule_row(rule, m):
    return ";".join([
        rule.consequent,
        "|".join(rule.antecedent),
        str(m.instances),
        fmt_fixed(m.support_exact, 3),
        fmt_trimmed(m.confidence_exact, 1),
        fmt_fixed(m.lift_exact, 1),
        fmt_fixed(m.j_measure_bits, 4),
        fmt_fixed(m.mdl_bits, 4),
    ])


def rules_to_csv(rules) -> str:
    """Semicolon CSV of scored rules in the order given."""
    buf = io.StringIO()
    buf.write(RULES_CSV_HEADER + "\n")
    for rule, m in rules:
        buf.write(format_rule_row(rule, m) + "\n")
    return buf.getvalue()
