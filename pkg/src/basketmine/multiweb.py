"""Item co-occurrence graph ("MultiWeb") with weak/medium/strong edges.

Pair counts come from a single matrix product of the unpacked presence
matrix.  Edges are weighted by count, support or lift and split into
three strength classes that map to line styles in the DOT export.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ._numfmt import fmt_fixed
from .dataset import VIRTUAL_PREFIX
from .mining import BitmapIndex

__all__ = [
    "WEIGHT_METRICS",
    "STRENGTHS",
    "Node",
    "Edge",
    "CoocGraph",
    "build_multiweb",
    "classify_edges",
    "export_dot",
    "edges_to_csv",
]

WEIGHT_METRICS = ("count", "support", "lift")
STRENGTHS = ("weak", "medium", "strong")
DOT_STYLE = {
    "weak": ("1", "dotted"),
    "medium": ("2", "solid"),
    "strong": ("4", "bold"),
}
DEFAULT_PERCENTILES = (33.0, 67.0)


@dataclass(frozen=True)
class Node:
    item: str
    count: int
    label: str


@dataclass(frozen=True)
class Edge:
    item_a: str
    item_b: str
    count: int
    support: Fraction
    lift: Fraction
    weight: float
    strength: str | None = None


@dataclass
class CoocGraph:
    n_baskets: int
    weight_metric: str
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def edge(self, a, b):
        a, b = sorted((a, b))
        for e in self.edges:
            if (e.item_a, e.item_b) == (a, b):
                return e
        raise KeyError((a, b))


def _dense(index, positions):
    packed = index.bits[positions].view(np.uint8)
    unpacked = np.unpackbits(packed, axis=1, bitorder="little")[:, : index.n_baskets]
    # float64 keeps the product on BLAS and exact for any realistic basket count
    return unpacked.astype(np.float64)


def build_multiweb(index: BitmapIndex, min_pair_count=1, weight_metric="lift",
                   include_virtual=False, names=None) -> CoocGraph:
    """Undirected co-occurrence graph over the items of ``index``.

    One edge per unordered pair seen together in at least
    ``min_pair_count`` baskets.  ``names`` maps item codes to display
    labels (an :class:`~basketmine.dataset.ItemCatalog` works).
    """
    if min_pair_count < 1:
        raise ValueError(f"min_pair_count must be >= 1, got {min_pair_count}")
    if weight_metric not in WEIGHT_METRICS:
        raise ValueError(f"weight_metric must be one of {WEIGHT_METRICS}, got {weight_metric!r}")
    n = index.n_baskets
    items = [i for i in index.item_order
             if include_virtual or not i.startswith(VIRTUAL_PREFIX)]
    # a pair can never beat the rarer endpoint's count
    items = [i for i in items if index.count(i) >= min_pair_count]

    def label(item):
        if names is None:
            return item
        if hasattr(names, "name"):
            return names.name(item)
        return names.get(item, item)

    graph = CoocGraph(n_baskets=n, weight_metric=weight_metric)
    graph.nodes = [Node(i, index.count(i), label(i)) for i in items]
    if len(items) < 2:
        return graph

    positions = np.array([index.position(i) for i in items], dtype=np.intp)
    dense = _dense(index, positions)
    pair = np.rint(dense @ dense.T).astype(np.int64)
    singles = np.diag(pair)
    rows, cols = np.nonzero(np.triu(pair >= min_pair_count, k=1))
    for r, c in zip(rows.tolist(), cols.tolist()):
        count = int(pair[r, c])
        support = Fraction(100 * count, n)
        lift = Fraction(count * n, int(singles[r]) * int(singles[c]))
        weight = {"count": count, "support": support, "lift": lift}[weight_metric]
        graph.edges.append(Edge(items[r], items[c], count, support, lift, float(weight)))
    return graph


def classify_edges(graph: CoocGraph, t_weak=None, t_strong=None) -> CoocGraph:
    """Label edges weak (< t_weak), strong (>= t_strong) or medium.

    Omitted thresholds default to the 33rd / 67th percentiles of the edge
    weights (linear interpolation).  If the defaults coincide, as when all
    weights are equal, every edge is medium.
    """
    weights = np.array([e.weight for e in graph.edges], dtype=float)
    explicit = t_weak is not None and t_strong is not None
    if len(weights):
        lo, hi = np.percentile(weights, DEFAULT_PERCENTILES)
    else:
        lo = hi = 0.0
    t_weak = float(lo) if t_weak is None else t_weak
    t_strong = float(hi) if t_strong is None else t_strong
    flat = not explicit and t_weak == t_strong
    if t_weak >= t_strong and not flat:
        raise ValueError(f"t_weak ({t_weak}) must be below t_strong ({t_strong})")

    def strength(w):
        if flat:
            return "medium"
        if w < t_weak:
            return "weak"
        if w >= t_strong:
            return "strong"
        return "medium"

    edges = [replace(e, strength=strength(e.weight)) for e in graph.edges]
    return CoocGraph(graph.n_baskets, graph.weight_metric, list(graph.nodes), edges)


def _quote(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: CoocGraph, name="multiweb") -> str:
    """Graphviz DOT source; nodes and edges in sorted order."""
    buf = io.StringIO()
    buf.write(f"graph {_quote(name)} {{\n")
    buf.write("  node [shape=ellipse];\n")
    for node in sorted(graph.nodes, key=lambda n: n.item):
        buf.write(f"  {_quote(node.item)} [label={_quote(node.label)}];\n")
    for e in sorted(graph.edges, key=lambda e: (e.item_a, e.item_b)):
        width, style = DOT_STYLE[e.strength or "medium"]
        buf.write(
            f"  {_quote(e.item_a)} -- {_quote(e.item_b)} "
            f"[penwidth={width}, style={style}, weight={e.count}];\n"
        )
    buf.write("}\n")
    return buf.getvalue()


def edges_to_csv(graph: CoocGraph) -> str:
    buf = io.StringIO()
    buf.write("item_a;item_b;count;support_pct;lift;strength\n")
    for e in sorted(graph.edges, key=lambda e: (e.item_a, e.item_b)):
        buf.write(
            f"{e.item_a};{e.item_b};{e.count};{fmt_fixed(e.support, 3)};"
            f"{fmt_fixed(e.lift, 3)};{e.strength or ''}\n"
        )
    return buf.getvalue()
