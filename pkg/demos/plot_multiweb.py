"""
Co-occurrence web
=================

Draw which items are bought together.  Pair counts come from one matrix
product; edges are weighted by lift and split into weak, medium and
strong at the 33rd and 67th percentiles.  The result is Graphviz DOT.
"""

# %%
from basketmine.dataset import build_catalog, group_into_baskets
from basketmine.mining import build_index
from basketmine.multiweb import build_multiweb, classify_edges, edges_to_csv, export_dot
from basketmine.synth import PlantedRule, SynthSpec, generate_records

spec = SynthSpec(
    n_baskets=3000,
    n_items=8,
    base_probability=(0.0, 0.1, 0.15, 0.15, 0.2, 0.2, 0.25, 0.25),
    planted=(PlantedRule((0,), 1, 0.8, 0.1),),
    seed=2,
)
records = generate_records(spec)
index = build_index(group_into_baskets(records))

# %%
graph = build_multiweb(index, min_pair_count=20, weight_metric="lift", names=build_catalog(records))
graph = classify_edges(graph)
print(edges_to_csv(graph))

# %%
# Render with ``dot -Tpng multiweb.dot -o multiweb.png`` if Graphviz is
# installed; the text itself is sorted and byte-stable.
dot = export_dot(graph)
print(dot[:400])
