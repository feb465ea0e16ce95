import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from legalnet.mesoclust import Clustering
from legalnet.partcmp import ari, ari_exact, contingency, nmi

from oracles import ari_oracle, expected_ri_by_permutation, nmi_oracle, pair_counts

partition_pairs = st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 4), min_size=n, max_size=n),
    st.lists(st.integers(0, 4), min_size=n, max_size=n)))


def as_map(labels):
    return {f"n{i}": c for i, c in enumerate(labels)}


def test_identical_partitions():
    x = as_map([0, 0, 1, 2, 2])
    assert nmi(x, x) == 1.0
    assert ari_exact(x, x) == 1


def test_nmi_hand_values():
    x = as_map([0, 0, 1, 1])
    assert nmi(x, as_map([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-15)
    assert nmi(x, as_map([0, 1, 2, 3])) == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_single_cluster_conventions():
    diag = []
    one = as_map([0, 0, 0])
    assert nmi(one, one) == 1.0
    assert nmi(one, as_map([0, 1, 1]), diag) == 0.0 and diag
    diag = []
    assert ari_exact(one, one, diag) == 1 and diag


def test_negative_ari():
    x, y = as_map([0, 0, 1, 1]), as_map([0, 1, 0, 1])
    assert ari_exact(x, y) == Fraction(-1, 2) == ari_oracle(x, y)


def test_mismatched_nodes_rejected():
    with pytest.raises(ValueError):
        nmi({"a": 0}, {"b": 0})
    with pytest.raises(ValueError):
        ari_exact({"a": 0}, {"a": 0})


def test_accepts_clusterings():
    a = Clustering({"a": 0, "b": 0, "c": 1})
    b = Clustering({"a": 1, "b": 1, "c": 0})
    assert ari(a, b) == 1.0
    assert contingency(a, b).counts == {(0, 1): 2, (1, 0): 1}


@given(partition_pairs)
def test_against_oracles(pair):
    x, y = as_map(pair[0]), as_map(pair[1])
    assert ari_exact(x, y) == ari_oracle(x, y)
    assert abs(nmi(x, y) - nmi_oracle(x, y)) <= 1e-12
    assert ari_exact(x, y) == ari_exact(y, x)


@given(st.integers(2, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 2), min_size=n, max_size=n),
    st.lists(st.integers(0, 2), min_size=n, max_size=n))))
def test_expectation_matches_permutation_average(pair):
    x, y = as_map(pair[0]), as_map(pair[1])
    a, b, c, d = pair_counts(x, y)
    total = a + b + c + d
    expected = expected_ri_by_permutation(x, y)
    ri = Fraction(a + b, total)
    if expected == 1:
        assert ari_exact(x, y) == 1
    else:
        assert ari_exact(x, y) == (ri - expected) / (1 - expected)
