"""Growth series, degree distributions, component statistics and rockets."""
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import networkx as nx
import numpy as np

from . import kernels
from .corpus import DOC_TYPES, SEQITEM
from .graphcore import REFERENCE, REFERENCE_CLASSES, reference_edges

SCOPES = DOC_TYPES + ("all",)


# --------------------------------------------------------------------------
# growth

@dataclass
class GrowthSeries:
    """Rows keyed by (country, scope, metric, year)."""

    baseline: int
    values: dict = field(default_factory=dict)

    def years(self):
        return sorted({k[3] for k in self.values})

    def value(self, country, scope, metric, year):
        return self.values[(country, scope, metric, year)]

    def relative(self, country, scope, metric, year) -> Optional[float]:
        base = self.values.get((country, scope, metric, self.baseline))
        if not base:
            return None
        return self.values[(country, scope, metric, year)] / base

    def delta(self, country, scope, metric) -> int:
        years = self.years()
        return self.value(country, scope, metric, years[-1]) - self.value(country, scope, metric, years[0])

    def delta_pct(self, country, scope, metric) -> Optional[float]:
        years = self.years()
        first = self.value(country, scope, metric, years[0])
        if not first:
            return None
        return 100.0 * (self.value(country, scope, metric, years[-1]) - first) / first

    def rows(self):
        for (country, scope, metric, year), v in sorted(self.values.items()):
            yield {"country": country, "scope": scope, "metric": metric, "year": year,
                   "value": v, "relative": self.relative(country, scope, metric, year)}


def snapshot_counts(graph) -> dict:
    """(scope, metric) -> count for one snapshot graph."""
    out = Counter()
    for _, d in graph.nodes(data=True):
        for scope in (d["doc_type"], "all"):
            out[(scope, "tokens")] += d["tokens"]
            out[(scope, "structures")] += 1
    for _, _, d in reference_edges(graph):
        cls = d["ref_class"]
        out[("all", f"ref_{cls}")] += 1
        out[("all", "references")] += 1
        if cls.startswith("lateral_"):
            out[(cls.split("_", 1)[1], "references")] += 1
    return out


def growth(graphs, baseline: Optional[int] = None) -> GrowthSeries:
    """Absolute and baseline-relative counts over a series of snapshot graphs.

    ``references`` counts lateral references for the doc-type scopes and all
    references for scope ``all``; the per-class counts live under
    ``ref_<class>``.
    """
    graphs = list(graphs)
    years = sorted(g.graph["year"] for g in graphs)
    if baseline is None and years:
        baseline = years[0]
    if years and baseline not in years:
        raise ValueError(f"baseline {baseline} outside {years[0]}..{years[-1]}")
    metrics = [(s, m) for s in SCOPES for m in ("tokens", "structures", "references")]
    metrics += [("all", f"ref_{c}") for c in REFERENCE_CLASSES]
    series = GrowthSeries(baseline)
    for g in graphs:
        counts = snapshot_counts(g)
        for scope, metric in metrics:
            series.values[(g.graph["country"], scope, metric, g.graph["year"])] = counts[(scope, metric)]
    return series


# --------------------------------------------------------------------------
# degree distributions

@dataclass
class DegreeDistribution:
    counts: dict
    direction: str
    weighted: bool
    normalized: bool
    empty_text: int = 0  # nodes left out of a normalized distribution


def _seqitems(graph, doc_types=None):
    for n, d in graph.nodes(data=True):
        if d.get("level_kind", SEQITEM) != SEQITEM:
            continue
        if doc_types and d.get("doc_type") not in doc_types:
            continue
        yield n, d


def _ref_edges(graph):
    if isinstance(graph, nx.MultiDiGraph) and any(True for _ in reference_edges(graph)):
        return reference_edges(graph)
    return ((u, v, d) for u, v, d in graph.edges(data=True) if d.get("edge_type", REFERENCE) == REFERENCE)


def degree_distribution(graph, direction: str = "in", classes=None, normalize: bool = False,
                        weighted: bool = True, doc_types=None) -> DegreeDistribution:
    """Distribution of reference in- or out-degrees over seqitems.

    Parallel edges count individually unless ``weighted`` is off.  With
    ``normalize`` each degree is divided by the node's token count; nodes
    without text are tallied in ``empty_text`` instead.
    """
    if direction not in ("in", "out"):
        raise ValueError("direction must be 'in' or 'out'")
    nodes = dict(_seqitems(graph, doc_types))
    deg = Counter()
    seen = set()
    for u, v, d in _ref_edges(graph):
        if classes and d.get("ref_class") not in classes:
            continue
        end = v if direction == "in" else u
        if end not in nodes:
            continue
        if not weighted:
            if (u, v) in seen:
                continue
            seen.add((u, v))
        deg[end] += 1
    counts = Counter()
    empty = 0
    for n, d in nodes.items():
        if normalize:
            tokens = d.get("tokens", 0)
            if not tokens:
                empty += 1
                continue
            counts[deg[n] / tokens] += 1
        else:
            counts[deg[n]] += 1
    return DegreeDistribution(dict(sorted(counts.items())), direction, weighted, normalize, empty)


# --------------------------------------------------------------------------
# components and rockets

def _index(graph):
    nodes = sorted(graph.nodes)
    return nodes, {n: i for i, n in enumerate(nodes)}


def _edge_arrays(graph, pos):
    pairs = sorted({(pos[u], pos[v]) for u, v, _ in _ref_edges(graph) if u in pos and v in pos})
    if not pairs:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    arr = np.asarray(pairs, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


def _csr(n, src, dst):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst.astype(np.int64)


def _reference_view(graph, doc_types=None):
    """Simple digraph over seqitems with collapsed reference edges."""
    nodes = dict(_seqitems(graph, doc_types))
    view = nx.DiGraph()
    view.add_nodes_from(nodes)
    view.add_edges_from((u, v) for u, v, _ in _ref_edges(graph) if u in nodes and v in nodes)
    return view, sum(d.get("tokens", 0) for d in nodes.values())


@dataclass
class ComponentStats:
    nodes: int
    lcc_size: int
    satellite_nodes: int
    isolates: int
    nontrivial: int
    tokens: int

    @property
    def satellite_components(self) -> int:
        return max(self.nontrivial - 1, 0)

    @property
    def lcc_share(self) -> Fraction:
        return Fraction(self.lcc_size, self.nodes) if self.nodes else Fraction(0)

    @property
    def satellite_share(self) -> Fraction:
        return Fraction(self.satellite_nodes, self.nodes) if self.nodes else Fraction(0)

    @property
    def isolate_share(self) -> Fraction:
        return Fraction(self.isolates, self.nodes) if self.nodes else Fraction(0)

    @property
    def per_1000_tokens(self) -> Optional[float]:
        return 1000.0 * self.nontrivial / self.tokens if self.tokens else None

    def to_dict(self):
        return {"nodes": self.nodes, "lcc_size": self.lcc_size, "satellite_nodes": self.satellite_nodes,
                "isolates": self.isolates, "nontrivial": self.nontrivial,
                "satellite_components": self.satellite_components, "tokens": self.tokens,
                "lcc_share": float(self.lcc_share), "satellite_share": float(self.satellite_share),
                "isolate_share": float(self.isolate_share), "per_1000_tokens": self.per_1000_tokens}


def _weak(view):
    nodes, pos = _index(view)
    src, dst = _edge_arrays(view, pos)
    labels = kernels.weak_labels(len(nodes), src, dst)
    return nodes, pos, labels


def components(graph, doc_types=None) -> ComponentStats:
    """Weak-component statistics of the seqitem reference subgraph."""
    view, tokens = _reference_view(graph, doc_types)
    nodes, _, labels = _weak(view)
    sizes = Counter(labels.tolist())
    big = [s for s in sizes.values() if s > 1]
    lcc = max(big, default=0)
    return ComponentStats(nodes=len(nodes), lcc_size=lcc, satellite_nodes=sum(big) - lcc,
                          isolates=sum(1 for s in sizes.values() if s == 1),
                          nontrivial=len(big), tokens=tokens)


@dataclass
class RocketDecomposition:
    lcc: frozenset
    scc: frozenset
    in_: frozenset
    out: frozenset
    tt: frozenset
    stats: Optional[ComponentStats] = None
    diagnostics: list = field(default_factory=list)

    def part_of(self, node) -> Optional[str]:
        for name in ("scc", "in_", "out", "tt"):
            if node in getattr(self, name):
                return name.rstrip("_")
        return None


def rocket(graph, doc_types=None) -> RocketDecomposition:
    """Split the largest weak component into SCC, IN, OUT and tendrils/tubes.

    The largest weak component and its largest SCC are both tie-broken by
    the smallest member key.
    """
    view, _ = _reference_view(graph, doc_types)
    if view.number_of_nodes() == 0:
        raise ValueError("rocket decomposition of an empty graph")
    nodes, pos, labels = _weak(view)
    sizes = Counter(labels.tolist())
    # labels are the smallest member index, so min() breaks ties by key
    lcc_label = min(sizes, key=lambda lab: (-sizes[lab], lab))
    members = np.flatnonzero(labels == lcc_label)
    local = {int(g): i for i, g in enumerate(members)}
    src, dst = _edge_arrays(view, pos)
    keep = np.isin(src, members)
    lsrc = np.array([local[int(s)] for s in src[keep]], np.int64)
    ldst = np.array([local[int(d)] for d in dst[keep]], np.int64)
    m = len(members)
    indptr, indices = _csr(m, lsrc, ldst)
    scc = kernels.scc_labels(indptr, indices)
    first = {}
    count = Counter(scc.tolist())
    for i, lab in enumerate(scc.tolist()):
        first.setdefault(lab, i)
    core_label = min(count, key=lambda lab: (-count[lab], first[lab]))
    diagnostics = []
    if count[core_label] == 1:
        msg = "all strongly connected components are singletons"
        diagnostics.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    ties = [lab for lab in count if count[lab] == count[core_label]]
    if len(ties) > 1 and count[core_label] > 1:
        diagnostics.append(f"{len(ties)} equally large strongly connected components; kept the one with the smallest key")
    core = scc == core_label
    fwd = kernels.reachable(indptr, indices, core)
    rptr, rind = _csr(m, ldst, lsrc)
    bwd = kernels.reachable(rptr, rind, core)
    key = [nodes[int(g)] for g in members]

    def pick(mask):
        return frozenset(key[i] for i in np.flatnonzero(mask))

    return RocketDecomposition(
        lcc=frozenset(key), scc=pick(core), out=pick(fwd & ~core), in_=pick(bwd & ~core),
        tt=pick(~fwd & ~bwd), stats=components(graph, doc_types), diagnostics=diagnostics)
