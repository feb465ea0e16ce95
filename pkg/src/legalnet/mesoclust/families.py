"""Cluster families: clusters linked across consecutive years by token overlap."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import networkx as nx

from ..corpus import DOC_TYPES
from ..graphcore import representatives

STATUTE_HEAVY, REGULATION_HEAVY, MIXED = "statute-heavy", "regulation-heavy", "mixed"
STATUTE_DRIVEN, REGULATION_DRIVEN = "statute-driven", "regulation-driven"


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def leaf_tokens(snapshot, graph) -> dict:
    """Tokens per leaf element with its doc type: key -> (doc_type, tokens)."""
    return {n.key: (n.doc_type, graph.nodes[n.key]["tokens"])
            for n in snapshot.nodes() if not n.children}


def cluster_of_leaves(graph, selector, clustering) -> dict:
    """Leaf or inner node key -> cluster id via its representative."""
    rep = representatives(graph, selector)
    return {k: clustering.labels[r] for k, r in rep.items() if r in clustering.labels}


def cluster_similarity(members_a, cluster_b_of, alignment, tokens, target) -> int:
    """Tokens of leaves in cluster A whose aligned image lies in cluster ``target``."""
    mapping = getattr(alignment, "mapping", alignment)
    total = 0
    for leaf in members_a:
        image = mapping.get(leaf)
        if image is not None and cluster_b_of.get(image) == target:
            total += tokens[leaf]
    return total


def overlaps(leaves_t: dict, cluster_t: dict, cluster_next: dict, alignment) -> dict:
    """(cluster at t, cluster at t+1) -> {doc_type: aligned leaf tokens}."""
    mapping = getattr(alignment, "mapping", alignment)
    out = {}
    for leaf, (doc_type, tokens) in leaves_t.items():
        a = cluster_t.get(leaf)
        image = mapping.get(leaf)
        b = cluster_next.get(image) if image is not None else None
        if a is None or b is None or not tokens:
            continue
        slot = out.setdefault((a, b), dict.fromkeys(DOC_TYPES, 0))
        slot[doc_type] += tokens
    return out


@dataclass
class FamilyGraph:
    graph: nx.Graph
    families: list = field(default_factory=list)   # sorted lists of (year, cluster)

    def family_of(self, node) -> int:
        for i, fam in enumerate(self.families):
            if node in fam:
                return i
        raise KeyError(node)

    def series(self, index: int) -> dict:
        """year -> {doc_type: tokens} for one family."""
        out = {}
        for year, cid in self.families[index]:
            d = self.graph.nodes[(year, cid)]
            slot = out.setdefault(year, dict.fromkeys(DOC_TYPES, 0))
            for dt in DOC_TYPES:
                slot[dt] += d[dt]
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        nodes = [{"year": y, "cluster": c, "family": self.family_of((y, c)),
                  **{dt: self.graph.nodes[(y, c)][dt] for dt in DOC_TYPES}}
                 for y, c in sorted(self.graph.nodes)]
        edges = [{"source": list(u), "target": list(v), **{k: d[k] for k in sorted(d)}}
                 for u, v, d in sorted((min(u, v), max(u, v), d) for u, v, d in self.graph.edges(data=True))]
        return {"nodes": nodes, "edges": edges,
                "families": [{"family": i, "series": {str(y): s for y, s in self.series(i).items()}}
                             for i in range(len(self.families))]}


def _scales(clusterings: dict) -> dict:
    """Per-year weights giving both doc types the same token mass."""
    out = {}
    for year, cl in clusterings.items():
        totals = {dt: sum(t[dt] for t in cl.tokens.values()) for dt in DOC_TYPES}
        grand = sum(totals.values())
        out[year] = {dt: (Fraction(grand, 2 * totals[dt]) if totals[dt] else Fraction(0)) for dt in DOC_TYPES}
    return out


def build_family_graph(clusterings: dict, pair_overlaps: dict, p=0.15, rescale: bool = False) -> FamilyGraph:
    """Link (year, cluster) nodes of consecutive years whose overlap covers ``p`` of both.

    ``clusterings`` maps year -> Clustering; ``pair_overlaps`` maps the
    earlier year of each adjacent pair to the output of :func:`overlaps`.
    """
    p = _exact(p)
    years = sorted(clusterings)
    scale = _scales(clusterings) if rescale else {y: dict.fromkeys(DOC_TYPES, Fraction(1)) for y in years}
    g = nx.Graph()

    def size(year, cid):
        t = clusterings[year].tokens.get(cid, {})
        return sum(t.get(dt, 0) * scale[year][dt] for dt in DOC_TYPES)

    for year in years:
        for cid in sorted(set(clusterings[year].labels.values())):
            t = clusterings[year].tokens.get(cid, {})
            g.add_node((year, cid), **{dt: t.get(dt, 0) for dt in DOC_TYPES})
    for year, nxt in zip(years, years[1:]):
        for (a, b), split in sorted(pair_overlaps.get(year, {}).items()):
            ov = sum(split[dt] * scale[year][dt] for dt in DOC_TYPES)
            if ov <= 0:
                continue
            sa, sb = size(year, a), size(nxt, b)
            if sa and sb and ov / sa >= p and ov / sb >= p:
                g.add_edge((year, a), (nxt, b), overlap=sum(split.values()),
                           share_source=float(ov / sa), share_target=float(ov / sb))
    families = sorted(sorted(c) for c in nx.connected_components(g))
    return FamilyGraph(g, families)


@dataclass
class FamilyClassification:
    composition: str
    majority: str
    growth: str
    statute_share: Fraction
    diagnostics: list = field(default_factory=list)


def classify_families(series: dict, first_year: Optional[int] = None, last_year: Optional[int] = None,
                      threshold=0.8, growth_threshold=0.8) -> FamilyClassification:
    """Composition and growth classes for one family.

    ``series`` maps year -> {"statute": tokens, "regulation": tokens}.
    Years outside the family's lifetime count as zero tokens.
    """
    if not series:
        raise ValueError("family has no years")
    threshold, growth_threshold = _exact(threshold), _exact(growth_threshold)
    shares = [Fraction(v["statute"], v["statute"] + v["regulation"])
              for _, v in sorted(series.items()) if v["statute"] + v["regulation"]]
    diagnostics = []
    share = sum(shares, Fraction(0)) / len(shares) if shares else Fraction(1, 2)
    if share >= threshold:
        composition = STATUTE_HEAVY
    elif share <= 1 - threshold:
        composition = REGULATION_HEAVY
    else:
        composition = MIXED
    majority = STATUTE_HEAVY if share > Fraction(1, 2) else REGULATION_HEAVY if share < Fraction(1, 2) else MIXED

    first = min(series) if first_year is None else first_year
    last = max(series) if last_year is None else last_year
    zero = {"statute": 0, "regulation": 0}
    start, end = series.get(first, zero), series.get(last, zero)
    d_stat = end["statute"] - start["statute"]
    d_reg = end["regulation"] - start["regulation"]
    net = d_stat + d_reg
    if net == 0:
        growth = MIXED
        diagnostics.append("zero net growth")
    elif Fraction(d_stat, net) >= growth_threshold:
        growth = STATUTE_DRIVEN
    elif Fraction(d_reg, net) >= growth_threshold:
        growth = REGULATION_DRIVEN
    else:
        growth = MIXED
    return FamilyClassification(composition, majority, growth, share, diagnostics)
