"""
Finding planted rules
=====================

Plant two rules in a synthetic corpus, mine it with Apriori and check
that the rules come back at the top of the lift ranking.  Along the way,
compare the measures the toolkit scores every rule with.
"""

# %%
from basketmine.mining import MiningParams, apriori, build_index
from basketmine.rules import RuleGenParams, generate_rules, rank_rules, rules_to_csv
from basketmine.synth import PlantedRule, SynthSpec, generate

spec = SynthSpec(
    n_baskets=10_000,
    n_items=15,
    base_probability=(0.0, 0.0, 0.04, 0.04) + (0.08,) * 11,
    planted=(
        PlantedRule(antecedent=(0,), consequent=2, target_confidence=0.7, antecedent_probability=0.03),
        PlantedRule(antecedent=(1, 4), consequent=3, target_confidence=0.8, antecedent_probability=0.02),
    ),
    seed=3,
)
baskets, truth = generate(spec)
for t in truth:
    print("planted", "|".join(t.antecedent), "=>", t.consequent, "target", t.target_confidence)

# %%
# Mining uses a vertical bitmap index; support counting is a popcount of
# ANDed bitmaps.  ``min_support`` can be a count or a fraction.
index = build_index(baskets)
table = apriori(index, MiningParams(min_support=0.005, max_len=3))
print(f"{len(table)} frequent itemsets, min count {table.min_count}")

# %%
# Rules carry support, confidence, lift, J-measure and MDL bits.
rules = generate_rules(table, index, RuleGenParams(min_confidence=0.3))
print(rules_to_csv(rank_rules(rules, "lift", 5)))

# %%
# J-measure favours rules that are both frequent and surprising; MDL
# favours rules that compress well (fewer bits is better).
for measure in ("j_measure", "mdl"):
    best, m = rank_rules(rules, measure, 1)[0]
    print(f"best by {measure}: {best}  (J={m.j_measure_bits:.4f} bits, MDL={m.mdl_bits:.1f} bits)")
