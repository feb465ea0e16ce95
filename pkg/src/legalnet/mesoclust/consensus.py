"""Consensus over many seeded map-equation runs."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .. import kernels
from .clustering import Clustering
from .mapequation import FlowGraph, canonical, single_run


def coclassification(partitions, n: int) -> np.ndarray:
    """How often each pair of nodes shares a module across ``partitions``."""
    counts = np.zeros((n, n), np.int64)
    for labels in partitions:
        kernels.coclass_accumulate(counts, np.asarray(labels, np.int64))
    return counts


def consensus_labels(counts: np.ndarray, runs: int, agreement: float) -> np.ndarray:
    """Connected components of the graph joining pairs with enough agreement."""
    n = counts.shape[0]
    if n == 0:
        return np.zeros(0, np.int64)
    joined = csr_matrix(counts >= agreement * runs - 1e-9)
    _, labels = connected_components(joined, directed=False)
    return canonical(labels)


def consensus_from_partitions(partitions, agreement: float = 0.95) -> np.ndarray:
    partitions = [np.asarray(p) for p in partitions]
    counts = coclassification(partitions, len(partitions[0]))
    return consensus_labels(counts, len(partitions), agreement)


def consensus_cluster(quotient, runs: int = 1000, agreement: float = 0.95, preferred_modules=None,
                      master_seed: int = 0, jobs: int = 1, slack: float = 0.01) -> Clustering:
    """Join nodes co-clustered in at least ``agreement * runs`` seeded runs.

    Run ``i`` draws from a generator derived from ``(master_seed, i)``, so
    results do not depend on ``jobs``.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not 0 < agreement <= 1:
        raise ValueError("agreement must be in (0, 1]")
    flow = FlowGraph.from_graph(quotient)
    counts = np.zeros((flow.n, flow.n), np.int64)

    def one(i):
        return single_run(flow, preferred_modules, master_seed, i, slack)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            for labels in pool.map(one, range(runs)):
                kernels.coclass_accumulate(counts, labels)
    else:
        for i in range(runs):
            kernels.coclass_accumulate(counts, one(i))
    labels = consensus_labels(counts, runs, agreement)
    return Clustering.from_labels(quotient, flow.keys, labels)
