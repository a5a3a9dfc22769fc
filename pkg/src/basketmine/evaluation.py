"""Holdout validation and rule triage.

Baskets are split at receipt level by a seeded 64-bit hash of the
receipt id, so a receipt's side never depends on input order.  Rules
mined on the training side are re-scored on the holdout side and
flagged stable when their confidence moves by at most ``delta``.

Triage only *suggests* a label (actionable / trivial / inexplicable);
an annotations file written by an analyst always wins.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction

from ._numfmt import fmt_fixed
from ._prng import MASK64, splitmix64
from .mining import build_index
from .rules import RULES_CSV_HEADER, Rule, format_rule_row, rule_counts

__all__ = [
    "DegenerateSplitError",
    "PatternFormatError",
    "SplitSpec",
    "ValidationEntry",
    "ValidationReport",
    "TriageThresholds",
    "TriageLabel",
    "RulePattern",
    "LABELS",
    "split_baskets",
    "holdout_value",
    "validate_rules",
    "parse_patterns",
    "parse_annotations",
    "triage",
    "triage_to_csv",
]

SPLIT_RESOLUTION = 10**6
LABELS = ("actionable", "trivial", "inexplicable", "unlabeled")


class DegenerateSplitError(ValueError):
    pass


class PatternFormatError(ValueError):
    pass


def _fnv1a64(text):
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & MASK64
    return h


def holdout_value(seed, receipt_id):
    """Deterministic value in ``[0, 10**6)`` deciding a receipt's side.

    ``splitmix64(splitmix64(seed) XOR fnv1a64(receipt_id)) mod 10**6``.
    """
    return splitmix64(splitmix64(seed & MASK64) ^ _fnv1a64(receipt_id)) % SPLIT_RESOLUTION


@dataclass(frozen=True)
class SplitSpec:
    holdout_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError(f"holdout_fraction must be in (0, 1), got {self.holdout_fraction!r}")


def split_baskets(baskets, spec: SplitSpec):
    """Partition baskets into ``(train, holdout)``, preserving input order."""
    baskets = list(baskets)
    if len(baskets) < 2:
        raise DegenerateSplitError("need at least two baskets to split")
    cut = Fraction(repr(spec.holdout_fraction)) * SPLIT_RESOLUTION
    train, holdout = [], []
    for b in baskets:
        (holdout if holdout_value(spec.seed, b.receipt_id) < cut else train).append(b)
    if not train or not holdout:
        raise DegenerateSplitError(
            f"split left {len(train)} train / {len(holdout)} holdout baskets"
        )
    return train, holdout


@dataclass(frozen=True)
class ValidationEntry:
    rule: Rule
    train: object  # RuleMetrics
    holdout_instances: int
    holdout_joint: int
    delta: float

    @property
    def supported(self):
        return self.holdout_instances > 0

    @property
    def train_confidence(self):
        return Fraction(self.train.joint, self.train.instances)

    @property
    def holdout_confidence(self):
        if not self.supported:
            return None
        return Fraction(self.holdout_joint, self.holdout_instances)

    @property
    def drop(self):
        if not self.supported:
            return None
        return abs(self.train_confidence - self.holdout_confidence)

    @property
    def status(self):
        if not self.supported:
            return "unsupported"
        return "stable" if self.drop <= Fraction(repr(self.delta)) else "unstable"

    @property
    def stable(self):
        return self.status == "stable"


@dataclass
class ValidationReport:
    entries: list = field(default_factory=list)
    delta: float = 0.1

    def summary(self):
        out = {"stable": 0, "unstable": 0, "unsupported": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    def by_rule(self):
        return {e.rule: e for e in self.entries}

    def to_csv(self):
        buf = io.StringIO()
        buf.write(RULES_CSV_HEADER + ";holdout_confidence;drop;stable\n")
        for e in self.entries:
            if e.supported:
                tail = f"{fmt_fixed(100 * e.holdout_confidence, 1)};{fmt_fixed(100 * e.drop, 1)};{e.status}"
            else:
                tail = ";;unsupported"
            buf.write(format_rule_row(e.rule, e.train) + ";" + tail + "\n")
        return buf.getvalue()


def validate_rules(rules_from_train, holdout_baskets, delta=0.1) -> ValidationReport:
    """Re-measure training rules on held-out baskets.

    Confidence on the holdout side comes from :func:`rule_counts`, the
    same counting path used when the rules were scored.  Rules whose
    antecedent never occurs in the holdout are reported as unsupported.
    """
    holdout_baskets = list(holdout_baskets)
    if not holdout_baskets:
        raise ValueError("holdout is empty")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta!r}")
    index = build_index(holdout_baskets)
    report = ValidationReport(delta=delta)
    for rule, metrics in rules_from_train:
        instances, joint, _ = rule_counts(rule, index, missing_ok=True)
        report.entries.append(ValidationEntry(rule, metrics, instances, joint, delta))
    return report


# ---------------------------------------------------------------------------
# Triage


@dataclass(frozen=True)
class TriageThresholds:
    epsilon: float = 0.1
    floor_instances: int = 5


@dataclass(frozen=True)
class TriageLabel:
    label: str
    rationale: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")


@dataclass(frozen=True)
class RulePattern:
    """``antecedent => consequent`` where either side may be ``*``."""

    antecedent: tuple | None
    consequent: str | None

    def matches(self, rule):
        if self.consequent is not None and rule.consequent != self.consequent:
            return False
        return self.antecedent is None or rule.antecedent == self.antecedent

    def __str__(self):
        ante = "*" if self.antecedent is None else "|".join(self.antecedent)
        return f"{ante} => {self.consequent or '*'}"


def _parse_pattern(text, lineno):
    if text.count("=>") != 1:
        raise PatternFormatError(f"line {lineno}: expected 'antecedent => consequent', got {text!r}")
    left, right = (s.strip() for s in text.split("=>"))
    if not left or not right:
        raise PatternFormatError(f"line {lineno}: empty side in {text!r}")
    if left == "*":
        ante = None
    else:
        items = [i.strip() for i in left.split("|")]
        if any(not i or i == "*" for i in items):
            raise PatternFormatError(f"line {lineno}: bad antecedent {left!r}")
        ante = tuple(sorted(set(items)))
    if "|" in right:
        raise PatternFormatError(f"line {lineno}: consequent must be a single item")
    return RulePattern(ante, None if right == "*" else right)


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_patterns(text) -> list[RulePattern]:
    """Known-association file: one ``a|b => c`` pattern per line, ``#`` comments."""
    return [_parse_pattern(line, n) for n, line in _content_lines(text)]


def parse_annotations(text) -> list[tuple[RulePattern, TriageLabel]]:
    """Analyst overrides: ``a|b => c = label  # optional rationale``.

    Later lines win when several patterns match the same rule.
    """
    out = []
    for lineno, line in _content_lines(text):
        body, _, note = line.partition("#")
        if "=" not in body.replace("=>", ""):
            raise PatternFormatError(f"line {lineno}: expected 'pattern = label'")
        pattern_text, _, label = body.rpartition("=")
        label = label.strip()
        if label not in LABELS:
            raise PatternFormatError(f"line {lineno}: unknown label {label!r}")
        rationale = note.strip() or "analyst override"
        out.append((_parse_pattern(pattern_text.strip(), lineno), TriageLabel(label, rationale)))
    return out


def _suggest(rule, metrics, known, thresholds):
    for pattern in known:
        if pattern.matches(rule):
            return TriageLabel("trivial", "known association")
    eps = Fraction(repr(thresholds.epsilon))
    if 1 - eps <= metrics.lift_exact <= 1 + eps:
        return TriageLabel("trivial", f"lift {metrics.lift:.3f} within {thresholds.epsilon} of 1")
    if metrics.instances < thresholds.floor_instances:
        return TriageLabel(
            "inexplicable",
            f"only {metrics.instances} instances (< {thresholds.floor_instances})",
        )
    return TriageLabel("actionable", f"lift {metrics.lift:.3f} over {metrics.instances} instances")


def triage(rules, known_associations=(), thresholds=TriageThresholds(), overrides=()):
    """Attach one suggested label to every scored rule.

    ``known_associations`` holds :class:`RulePattern` objects (or the
    text of a pattern file); ``overrides`` holds ``(pattern, label)``
    pairs from :func:`parse_annotations` and take precedence.
    """
    if isinstance(known_associations, str):
        known_associations = parse_patterns(known_associations)
    if isinstance(overrides, str):
        overrides = parse_annotations(overrides)
    out = []
    for rule, metrics in rules:
        label = _suggest(rule, metrics, known_associations, thresholds)
        for pattern, forced in overrides:
            if pattern.matches(rule):
                label = forced
        out.append((rule, metrics, label))
    return out


def triage_to_csv(triaged) -> str:
    buf = io.StringIO()
    buf.write(RULES_CSV_HEADER + ";label;rationale\n")
    for rule, metrics, label in triaged:
        rationale = label.rationale.replace(";", ",")
        buf.write(f"{format_rule_row(rule, metrics)};{label.label};{rationale}\n")
    return buf.getvalue()
