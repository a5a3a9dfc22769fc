"""
Holdout checks and triage
=========================

A rule that only holds on the data it was mined from is noise.  Split
receipts into train and holdout, re-measure every rule on the holdout,
then sort the survivors into actionable, trivial and inexplicable.
"""

# %%
from basketmine.evaluation import (
    SplitSpec,
    TriageThresholds,
    parse_annotations,
    parse_patterns,
    split_baskets,
    triage,
    validate_rules,
)
from basketmine.mining import MiningParams, apriori, build_index
from basketmine.rules import RuleGenParams, generate_rules
from basketmine.synth import PlantedRule, SynthSpec, generate

spec = SynthSpec(
    n_baskets=8000,
    n_items=10,
    base_probability=(0.0, 0.05) + (0.1,) * 8,
    planted=(PlantedRule((0,), 1, 0.75, 0.05),),
    seed=5,
)
baskets, _ = generate(spec)

# %%
# Membership in the holdout depends only on the seed and the receipt id,
# so shuffling the input never changes the split.
train, holdout = split_baskets(baskets, SplitSpec(holdout_fraction=0.3, seed=5))
print(f"train {len(train)}, holdout {len(holdout)}")

index = build_index(train)
rules = generate_rules(apriori(index, MiningParams(40, 2)), index, RuleGenParams(0.2))
report = validate_rules(rules, holdout, delta=0.1)
print(report.summary())
for e in report.entries[:5]:
    print(f"{str(e.rule):12s} train {float(e.train_confidence):.3f} "
          f"holdout {float(e.holdout_confidence):.3f} {e.status}")

# %%
# Triage uses a list of known associations and optional analyst overrides.
known = parse_patterns("# everybody knows\nI002 => *\n")
overrides = parse_annotations("I000 => I001 = actionable  # promo bundle\n")
labelled = triage(rules, known, TriageThresholds(epsilon=0.1, floor_instances=5), overrides)
for rule, metrics, label in labelled[:6]:
    print(f"{str(rule):12s} lift {metrics.lift:5.2f}  {label.label:12s} {label.rationale}")
