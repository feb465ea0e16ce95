"""Star extraction from reference graphs and sink/hinge/source typing."""
import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .macrostats import _csr, _reference_view

SINK, HINGE, SOURCE = "sink", "hinge", "source"
CSV_COLUMNS = ("hub", "n", "m_s", "delta_out", "delta_in", "type", "heading")


@dataclass(frozen=True)
class Star:
    hub: object
    spokes: tuple
    n: int
    m_s: int
    delta_out: int
    delta_in: int
    star_type: str
    heading: str = ""


def classify_star(delta_out, delta_in: int = None, ratio: int = 10) -> str:
    """Sink if in >= ratio*out, source if out >= ratio*in, else hinge.

    Accepts a :class:`Star` or the two hub degrees.
    """
    if isinstance(delta_out, Star):
        delta_out, delta_in = delta_out.delta_out, delta_out.delta_in
    if delta_out < 0 or delta_in < 0:
        raise ValueError("degrees must be non-negative")
    if delta_out == 0 and delta_in == 0:
        raise ValueError("a hub without edges is not a star")
    if delta_in >= ratio * delta_out:
        return SINK
    if delta_out >= ratio * delta_in:
        return SOURCE
    return HINGE


def _undirected(view, nodes, pos):
    pairs = {(pos[u], pos[v]) for u, v in view.edges if u != v}
    pairs |= {(b, a) for a, b in pairs}
    if not pairs:
        e = np.empty(0, np.int64)
        return _csr(len(nodes), e, e)
    arr = np.asarray(sorted(pairs), np.int64)
    return _csr(len(nodes), arr[:, 0].copy(), arr[:, 1].copy())


def extract_stars(graph, min_size: int = 10, density_cap: float = 0.05, ratio: int = 10,
                  doc_types=None, jobs: int = 1) -> list:
    """Every node whose pruned ego neighbourhood has at least ``min_size`` nodes.

    Parallel edges and self-loops are ignored.  Spokes are pruned greedily
    (most spoke-adjacencies first, smallest key on ties) until none is
    adjacent to more than ``density_cap`` of the other spokes.
    """
    view, _ = _reference_view(graph, doc_types)
    nodes = sorted(view.nodes)
    pos = {n: i for i, n in enumerate(nodes)}
    indptr, indices = _undirected(view, nodes, pos)
    cap = Fraction(str(density_cap))
    headings = {n: (graph.nodes[n].get("heading") or "") for n in nodes}

    def one(v):
        spokes = indices[indptr[v]:indptr[v + 1]]
        if spokes.shape[0] + 1 < min_size:
            return None
        in_set = np.zeros(len(nodes), np.bool_)
        slot = np.zeros(len(nodes), np.int64)
        keep = kernels.prune_star(indptr, indices, spokes, in_set, slot, cap.numerator, cap.denominator)
        kept = spokes[keep]
        if kept.shape[0] + 1 < min_size:
            return None
        kept_set = set(kept.tolist())
        m_s = sum(1 for s in kept.tolist() for w in indices[indptr[s]:indptr[s + 1]].tolist()
                  if w in kept_set) // 2
        hub = nodes[v]
        d_out = sum(1 for w in view.successors(hub) if w != hub)
        d_in = sum(1 for w in view.predecessors(hub) if w != hub)
        return Star(hub, tuple(nodes[s] for s in kept.tolist()), kept.shape[0] + 1, m_s,
                    d_out, d_in, classify_star(d_out, d_in, ratio), headings[hub])

    candidates = range(len(nodes))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            found = list(pool.map(one, candidates, chunksize=64))
    else:
        found = [one(v) for v in candidates]
    return [s for s in found if s is not None]


def spoke_adjacency(graph, star: Star) -> dict:
    """Spoke -> number of other spokes it touches (undirected, collapsed)."""
    spokes = set(star.spokes)
    out = {}
    for s in star.spokes:
        nbrs = set(graph.successors(s)) | set(graph.predecessors(s))
        out[s] = len((nbrs - {s}) & spokes)
    return out


def top_k(stars, k: int = 10, star_type=None) -> list:
    chosen = [s for s in stars if star_type is None or s.star_type == star_type]
    return sorted(chosen, key=lambda s: (-s.n, str(s.hub)))[:k]


def write_csv(stars, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for s in sorted(stars, key=lambda s: (-s.n, str(s.hub))):
            w.writerow([s.hub, s.n, s.m_s, s.delta_out, s.delta_in, s.star_type, s.heading])
    return path
