"""Partition comparison: normalized mutual information and adjusted Rand index.

Partitions are mappings from node key to cluster id (or objects with a
``labels`` mapping).  Counting is done in integers; ARI is exact.
"""
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


def _labels(x):
    return getattr(x, "labels", x)


@dataclass
class ContingencyTable:
    counts: dict      # (row cluster, column cluster) -> n_ij
    rows: Counter
    cols: Counter
    n: int


def contingency(x, y) -> ContingencyTable:
    x, y = _labels(x), _labels(y)
    if set(x) != set(y):
        raise ValueError("partitions cover different node sets")
    counts = Counter((x[k], y[k]) for k in x)
    return ContingencyTable(dict(counts), Counter(x.values()), Counter(y.values()), len(x))


def _entropy(sizes, n):
    return -sum(s / n * math.log(s / n) for s in sizes if s)


def nmi(x, y, diagnostics: Optional[list] = None) -> float:
    """I(X;Y) / sqrt(H(X) H(Y)) in nats."""
    t = contingency(x, y)
    if t.n == 0:
        return 1.0
    hx = _entropy(t.rows.values(), t.n)
    hy = _entropy(t.cols.values(), t.n)
    if len(t.rows) == 1 and len(t.cols) == 1:
        return 1.0
    if len(t.rows) == 1 or len(t.cols) == 1:
        if diagnostics is not None:
            diagnostics.append("nmi: one partition has zero entropy; reported as 0")
        return 0.0
    n = t.n
    mi = 0.0
    for (a, b), nij in t.counts.items():
        mi += nij / n * math.log(n * nij / (t.rows[a] * t.cols[b]))
    return min(max(mi / math.sqrt(hx * hy), 0.0), 1.0)


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def ari_exact(x, y, diagnostics: Optional[list] = None) -> Fraction:
    """Adjusted Rand index under the fixed-marginals permutation model."""
    t = contingency(x, y)
    if t.n < 2:
        raise ValueError("ARI needs at least two nodes")
    index = sum(_pairs(v) for v in t.counts.values())
    a = sum(_pairs(v) for v in t.rows.values())
    b = sum(_pairs(v) for v in t.cols.values())
    expected = Fraction(a * b, _pairs(t.n))
    top = Fraction(a + b, 2)
    if top == expected:
        if diagnostics is not None:
            diagnostics.append("ari: degenerate denominator; reported as 1")
        return Fraction(1)
    return (index - expected) / (top - expected)


def ari(x, y, diagnostics: Optional[list] = None) -> float:
    return float(ari_exact(x, y, diagnostics))
