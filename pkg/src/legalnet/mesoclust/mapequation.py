"""Two-level map equation: evaluation and a seeded optimizer.

Flow comes from the undirected, weighted version of a quotient graph:
node visit rates are strengths over twice the total weight and the flow on
an undirected link is its weight over twice the total weight.  A self-loop
of weight w adds 2w to its node's strength but never exits a module.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .. import kernels

MAX_SWEEPS = 50
MOVE_TOL = 1e-10


def _plogp(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


@dataclass
class FlowGraph:
    """Undirected flow network on nodes 0..n-1."""

    keys: list
    matrix: sp.csr_matrix   # symmetric weights, self-loops on the diagonal as 2w
    total: float            # sum of all matrix entries (2W)
    indptr: np.ndarray = field(repr=False, default=None)
    indices: np.ndarray = field(repr=False, default=None)
    link_flow: np.ndarray = field(repr=False, default=None)
    node_flow: np.ndarray = field(repr=False, default=None)
    node_exit: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        m = self.matrix.tocsr()
        m.sort_indices()
        self.matrix = m
        n = m.shape[0]
        off = m.copy()
        off.setdiag(0)
        off.eliminate_zeros()
        off.sort_indices()
        scale = self.total if self.total > 0 else 1.0
        self.indptr = off.indptr.astype(np.int64)
        self.indices = off.indices.astype(np.int64)
        self.link_flow = off.data.astype(float) / scale
        self.node_flow = np.asarray(m.sum(axis=1)).ravel() / scale if n else np.zeros(0)
        self.node_exit = np.asarray(off.sum(axis=1)).ravel() / scale if n else np.zeros(0)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_graph(cls, graph, weight: str = "weight") -> "FlowGraph":
        keys = sorted(graph.nodes)
        pos = {k: i for i, k in enumerate(keys)}
        rows, cols, vals = [], [], []
        for u, v, d in graph.edges(data=True):
            w = float(d.get(weight, 1.0))
            i, j = pos[u], pos[v]
            # each directed edge adds w to both symmetric entries; a loop adds 2w
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        n = len(keys)
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        return cls(keys, m, float(m.sum()))

    def aggregate(self, labels, k) -> "FlowGraph":
        ind = sp.csr_matrix((np.ones(self.n), (np.arange(self.n), labels)), shape=(self.n, k))
        return FlowGraph(list(range(k)), (ind.T @ self.matrix @ ind).tocsr(), self.total)


def module_flows(flow: FlowGraph, labels):
    """Per-module (exit flow, visit flow) for compact labels 0..k-1."""
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max()) + 1 if labels.size else 0
    visit = np.bincount(labels, weights=flow.node_flow, minlength=k)
    src = np.repeat(np.arange(flow.n), np.diff(flow.indptr))
    cross = labels[src] != labels[flow.indices]
    exit_ = np.bincount(labels[src[cross]], weights=flow.link_flow[cross], minlength=k)
    return exit_, visit


def codelength(flow: FlowGraph, labels) -> float:
    """Two-level map equation L(M) in bits."""
    if flow.n == 0 or flow.total <= 0:
        return 0.0
    labels = _compact(labels)[0]
    q, p = module_flows(flow, labels)
    return float(_plogp(q.sum()) - 2.0 * _plogp(q).sum() - _plogp(flow.node_flow).sum()
                 + _plogp(q + p).sum())


def map_equation(graph, partition) -> float:
    """L(M) for a graph and a mapping node -> module id."""
    flow = FlowGraph.from_graph(graph)
    return codelength(flow, [partition[k] for k in flow.keys])


def _compact(labels):
    _, inv = np.unique(np.asarray(labels), return_inverse=True)
    inv = inv.astype(np.int64)
    return inv, (int(inv.max()) + 1 if inv.size else 0)


def _state(flow, labels):
    labels, k = _compact(labels)
    n = flow.n
    mod_exit = np.zeros(n)
    mod_flow = np.zeros(n)
    mod_size = np.zeros(n, np.int64)
    q, p = module_flows(flow, labels)
    mod_exit[:k] = q
    mod_flow[:k] = p
    mod_size[:k] = np.bincount(labels, minlength=k)
    return labels, mod_flow, mod_exit, mod_size


def _move(flow, labels, rng):
    module, mod_flow, mod_exit, mod_size = _state(flow, labels)
    moved = kernels.local_moves(flow.indptr, flow.indices, flow.link_flow, flow.node_flow,
                                flow.node_exit, module, mod_flow, mod_exit, mod_size,
                                rng.permutation(flow.n).astype(np.int64), MAX_SWEEPS, MOVE_TOL)
    return module, moved


def optimize(flow: FlowGraph, rng, max_rounds: int = 10) -> np.ndarray:
    """Local moves on nodes, then on aggregated modules, repeated to convergence."""
    if flow.n == 0:
        return np.zeros(0, np.int64)
    if flow.total <= 0:
        return np.arange(flow.n)
    labels = np.arange(flow.n)
    for _ in range(max_rounds):
        labels, moved_leaf = _move(flow, labels, rng)
        labels, k = _compact(labels)
        moved_any = moved_leaf
        current = labels
        level = flow
        while k > 1:
            level = level.aggregate(current, k)
            sub, moved = _move(level, np.arange(k), rng)
            if moved == 0:
                break
            moved_any += moved
            sub, k2 = _compact(sub)
            labels = sub[labels]
            current, k = sub, k2
        labels, _ = _compact(labels)
        if moved_any == 0:
            break
    return labels


# --------------------------------------------------------------------------
# steering toward a preferred number of modules

def _module_matrix(flow, labels, k):
    ind = sp.csr_matrix((np.ones(flow.n), (np.arange(flow.n), labels)), shape=(flow.n, k))
    return np.asarray((ind.T @ flow.matrix @ ind).todense()) / flow.total


def _merge_pass(flow, labels, target, limit):
    labels, k = _compact(labels)
    active = np.bincount(labels, weights=flow.node_flow, minlength=k) > 0
    if active.sum() <= target:
        return labels
    h_nodes = float(_plogp(flow.node_flow).sum())
    B = _module_matrix(flow, labels, k)
    p = B.sum(axis=1)
    q = p - np.diag(B)
    owner = np.arange(k)
    alive = active.copy()
    total_q = q.sum()
    L = float(_plogp(total_q) - 2 * _plogp(q).sum() - h_nodes + _plogp(q + p).sum())
    while alive.sum() > target:
        idx = np.flatnonzero(alive)
        sub = B[np.ix_(idx, idx)]
        qa, pa = q[idx], p[idx]
        qn = qa[:, None] + qa[None, :] - 2 * sub
        pn = pa[:, None] + pa[None, :]
        s_new = total_q - 2 * sub
        delta = (_plogp(s_new) - _plogp(total_q)
                 - 2 * (_plogp(qn) - _plogp(qa)[:, None] - _plogp(qa)[None, :])
                 + _plogp(qn + pn) - _plogp(qa + pa)[:, None] - _plogp(qa + pa)[None, :])
        iu = np.triu_indices(len(idx), 1)
        flat = delta[iu]
        best = int(np.argmin(flat))
        if L + flat[best] > limit:
            break
        a, b = idx[iu[0][best]], idx[iu[1][best]]
        L += float(flat[best])
        total_q = float(s_new[iu[0][best], iu[1][best]])
        q[a] = qn[iu[0][best], iu[1][best]]
        p[a] += p[b]
        B[a, :] += B[b, :]
        B[:, a] += B[:, b]
        B[b, :] = 0
        B[:, b] = 0
        alive[b] = False
        owner[owner == b] = a
    return _compact(owner[labels])[0]


def _bisect(flow, members):
    sub = flow.matrix[members][:, members].toarray()
    np.fill_diagonal(sub, 0.0)
    lap = np.diag(sub.sum(axis=1)) - sub
    _, vecs = np.linalg.eigh(lap)
    fiedler = vecs[:, 1]
    side = fiedler > np.median(fiedler)
    if side.all() or not side.any():
        side = np.arange(len(members)) >= len(members) // 2
    return side


def _split_pass(flow, labels, target, limit):
    labels, k = _compact(labels)
    while k < target:
        visit = np.bincount(labels, weights=flow.node_flow, minlength=k)
        best = None
        for m in np.argsort(-visit, kind="stable"):
            members = np.flatnonzero(labels == m)
            if len(members) < 2 or visit[m] <= 0:
                continue
            side = _bisect(flow, members)
            trial = labels.copy()
            trial[members[side]] = k
            L = codelength(flow, trial)
            if best is None or L < best[0]:
                best = (L, trial)
        if best is None or best[0] > limit:
            break
        labels, k = _compact(best[1])
    return labels


def steer(flow: FlowGraph, labels, preferred: int, slack: float = 0.01) -> np.ndarray:
    """Merge or split modules toward ``preferred`` while L stays within ``slack``."""
    labels, k = _compact(labels)
    if flow.total <= 0 or preferred is None or k == preferred:
        return labels
    limit = codelength(flow, labels) * (1.0 + slack)
    if k > preferred:
        return _merge_pass(flow, labels, preferred, limit)
    return _split_pass(flow, labels, preferred, limit)


# --------------------------------------------------------------------------
# public entry points

def run_rng(master_seed: int, run: int) -> np.random.Generator:
    """Independent generator for one run, derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(run,)))


def canonical(labels) -> np.ndarray:
    """Relabel so module ids follow the position of each module's first node."""
    labels = np.asarray(labels)
    order = {}
    out = np.empty(len(labels), np.int64)
    for i, lab in enumerate(labels.tolist()):
        out[i] = order.setdefault(lab, len(order))
    return out


def single_run(flow: FlowGraph, preferred=None, seed: int = 0, run: int = 0, slack: float = 0.01):
    labels = optimize(flow, run_rng(seed, run))
    if preferred is not None:
        if preferred < 1:
            raise ValueError("preferred_modules must be >= 1")
        labels = steer(flow, labels, preferred, slack)
    return canonical(labels)


def map_equation_cluster(quotient, preferred_modules=None, seed: int = 0, slack: float = 0.01):
    """Seeded two-level map-equation clustering of the undirected quotient."""
    from .clustering import Clustering
    flow = FlowGraph.from_graph(quotient)
    labels = single_run(flow, preferred_modules, seed, 0, slack)
    return Clustering.from_labels(quotient, flow.keys, labels)
