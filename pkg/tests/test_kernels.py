"""Compiled kernels agree with their plain-Python definitions."""
import json
import os
import subprocess
import sys

import networkx as nx
import numpy as np
import pytest

from legalnet import _accel, backend, kernels
from legalnet.macrostats import _csr
from legalnet.mesoclust import FlowGraph, codelength
from legalnet.mesoclust.mapequation import MAX_SWEEPS, MOVE_TOL, _state, module_flows

rng = np.random.default_rng(42)


def random_csr(n, m):
    src = rng.integers(0, n, m).astype(np.int64)
    dst = rng.integers(0, n, m).astype(np.int64)
    return src, dst, *_csr(n, src, dst)


def test_backend_flag():
    assert backend() == ("numba" if _accel.USE_NUMBA else "python")


@pytest.mark.parametrize("n, m", [(1, 0), (10, 15), (80, 200)])
def test_graph_kernels(n, m):
    src, dst, indptr, indices = random_csr(n, m)
    assert np.array_equal(kernels.scc_labels(indptr, indices), kernels.PY["scc_labels"](indptr, indices))
    seed = np.zeros(n, np.bool_)
    seed[0] = True
    assert np.array_equal(kernels.reachable(indptr, indices, seed), kernels.PY["reachable"](indptr, indices, seed))
    assert np.array_equal(kernels.weak_labels(n, src, dst), kernels.PY["weak_labels"](n, src, dst))


def test_scc_labels_group_mutually_reachable_nodes():
    edges = [(0, 1), (1, 2), (2, 0), (2, 3), (4, 4)]
    src = np.array([e[0] for e in edges], np.int64)
    dst = np.array([e[1] for e in edges], np.int64)
    labels = kernels.scc_labels(*_csr(5, src, dst))
    assert labels[0] == labels[1] == labels[2]
    assert len({labels[0], labels[3], labels[4]}) == 3


def test_plogp_and_coclass():
    for x in (0.0, 1e-300, 0.25, 1.0):
        assert kernels.plogp(x) == pytest.approx(kernels.PY["plogp"](x), abs=1e-15)
    labels = rng.integers(0, 4, 30).astype(np.int64)
    a = np.zeros((30, 30), np.int64)
    b = np.zeros((30, 30), np.int64)
    kernels.coclass_accumulate(a, labels)
    kernels.PY["coclass"](b, labels)
    assert np.array_equal(a, b)


def test_jaro_winkler_kernel():
    for _ in range(50):
        a = rng.integers(97, 101, rng.integers(0, 15)).astype(np.int64)
        b = rng.integers(97, 101, rng.integers(0, 15)).astype(np.int64)
        assert kernels.jaro_winkler_codes(a, b, 0.1, 4) == pytest.approx(
            kernels.PY["jaro_winkler"](a, b, 0.1, 4), abs=1e-15)


def test_prune_star_kernel():
    n = 60
    src, dst, *_ = random_csr(n, 400)
    pairs = sorted({(int(u), int(v)) for u, v in zip(src, dst) if u != v} |
                   {(int(v), int(u)) for u, v in zip(src, dst) if u != v})
    s = np.array([p[0] for p in pairs], np.int64)
    d = np.array([p[1] for p in pairs], np.int64)
    indptr, indices = _csr(n, s, d)
    for v in range(0, n, 7):
        spokes = indices[indptr[v]:indptr[v + 1]]
        outs = []
        for fn in (kernels.prune_star, kernels.PY["prune_star"]):
            in_set = np.zeros(n, np.bool_)
            slot = np.zeros(n, np.int64)
            outs.append(fn(indptr, indices, spokes, in_set, slot, 1, 20))
            assert not in_set.any()
        assert np.array_equal(*outs)


def test_local_moves_kernel():
    g = nx.gnp_random_graph(50, 0.1, seed=4, directed=True)
    nx.set_edge_attributes(g, 1, "weight")
    flow = FlowGraph.from_graph(g)
    order = rng.permutation(flow.n).astype(np.int64)
    results = []
    for fn in (kernels.local_moves, kernels.PY["local_moves"]):
        module, mf, me, ms = _state(flow, np.arange(flow.n))
        moved = fn(flow.indptr, flow.indices, flow.link_flow, flow.node_flow, flow.node_exit,
                   module, mf, me, ms, order, MAX_SWEEPS, MOVE_TOL)
        results.append((moved, module.tolist()))
        # incrementally tracked module state matches a recomputation
        ids = np.unique(module)
        q, p = module_flows(flow, np.searchsorted(ids, module))
        assert me[ids] == pytest.approx(q, abs=1e-12)
        assert mf[ids] == pytest.approx(p, abs=1e-12)
        assert ms[ids].sum() == flow.n and not ms[np.setdiff1d(np.arange(flow.n), ids)].any()
    assert results[0] == results[1]
    assert codelength(flow, results[0][1]) < codelength(flow, np.arange(flow.n))


SCRIPT = """
import json, networkx as nx
from legalnet import backend
from legalnet.mesoclust import consensus_cluster
g = nx.stochastic_block_model([15, 15, 15], [[0.5, 0.02, 0.02], [0.02, 0.5, 0.02], [0.02, 0.02, 0.5]],
                              seed=1, directed=True)
nx.set_edge_attributes(g, 1, "weight")
c = consensus_cluster(g, runs=20, master_seed=5)
print(json.dumps({"backend": backend(), "labels": sorted(c.labels.items())}))
"""


def test_fallback_path_gives_identical_results():
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, LEGALNET_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
        out[flag] = json.loads(res.stdout)
    assert out["1"]["backend"] == "python"
    assert out["0"]["labels"] == out["1"]["labels"]
