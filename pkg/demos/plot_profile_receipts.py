"""
Profiling a receipt log
=======================

Before mining anything, look at what the store sells and who buys it.
This demo fabricates a small convenience-store log, groups lines into
baskets and prints the item frequency table plus gender and weekday
profiles.
"""

# %%
# A receipt log is just POS lines.  We make one with the synthetic
# generator so the demo needs no data files.
from basketmine.dataset import (
    build_catalog,
    categorical_profile,
    frequency_table,
    group_into_baskets,
)
from basketmine.synth import SynthSpec, generate_records

spec = SynthSpec(
    n_baskets=2000,
    n_items=12,
    base_probability=tuple(0.02 + 0.03 * i for i in range(12)),
    female_share=0.3,
    seed=11,
)
records = generate_records(spec)
baskets = group_into_baskets(records)
catalog = build_catalog(records)
print(f"{len(records)} lines -> {len(baskets)} baskets, {len(catalog)} items")

# %%
# Top sellers, with percentages of baskets rounded half-up to 2 places.
for row in frequency_table(baskets)[:5]:
    print(f"{row.item}  {catalog.name(row.item):10s} {row.count:5d}  {row.percent}%")

# %%
# Who is shopping, and when.
for attr in ("gender", "day_of_week"):
    print(attr)
    for row in categorical_profile(baskets, attr):
        print(f"  {row.value:4s} {row.count:5d}  {row.percent}%")
