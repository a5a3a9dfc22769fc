"""Market basket analysis: from POS receipts to ranked association rules.

Modules
-------
dataset     POS CSV ingestion, baskets, virtual items, profiling
mining      bitmap index, Apriori, brute-force reference miner
rules       rule generation; support, confidence, lift, J-measure, MDL
evaluation  receipt-level holdout split, rule validation, triage
multiweb    co-occurrence graph and DOT export
synth       synthetic corpora with planted rules
cli         ``basketmine`` command line
"""

__version__ = "0.1.0"

from .dataset import (
    Basket,
    ItemCatalog,
    PosRecord,
    VirtualItemSpec,
    build_catalog,
    categorical_profile,
    derive_virtual_items,
    discretize_age,
    frequency_table,
    group_into_baskets,
    parse_pos_csv,
    read_pos_csv,
)
from .evaluation import SplitSpec, TriageThresholds, split_baskets, triage, validate_rules
from .mining import (
    BitmapIndex,
    FrequentItemsetTable,
    MiningParams,
    apriori,
    brute_force_frequent,
    build_index,
    candidate_join_prune,
    support_count,
)
from .multiweb import build_multiweb, classify_edges, export_dot
from .rules import (
    Rule,
    RuleGenParams,
    RuleMetrics,
    compute_metrics,
    generate_rules,
    j_measure,
    mdl_score,
    rank_rules,
)
from .synth import PlantedRule, SynthSpec, generate
