from fractions import Fraction

import pytest

from legalnet.mesoclust import (Clustering, build_family_graph, classify_families, cluster_similarity,
                                family_tfidf, overlaps)
from legalnet.mesoclust.families import (MIXED, REGULATION_DRIVEN, REGULATION_HEAVY, STATUTE_DRIVEN,
                                         STATUTE_HEAVY)
from legalnet.mesoclust.tfidf import default_stoplist, terms

from builders import three_year_families


def edge_set(fg):
    return {tuple(sorted(e)) for e in fg.graph.edges}


def test_cluster_similarity():
    tokens = {"a": 150, "b": 50, "c": 800}
    members = ["a", "b", "c"]
    target_of = {"A": 7, "B": 7, "C": 8}
    mapping = {"a": "A", "b": "B", "c": "C"}
    assert cluster_similarity(members, target_of, mapping, tokens, 7) == 200
    assert cluster_similarity(members, target_of, mapping, tokens, 9) == 0
    assert cluster_similarity(["c"], target_of, mapping, tokens, 8) == 800


def _pair(a_tokens, b_tokens, overlap):
    cl = {2000: Clustering({"A": 0}, {0: {"statute": a_tokens, "regulation": 0}}),
          2001: Clustering({"B": 0}, {0: {"statute": b_tokens, "regulation": 0}})}
    return cl, {2000: {(0, 0): {"statute": overlap, "regulation": 0}}}


def test_threshold_arithmetic():
    cl, ov = _pair(1000, 1200, 200)
    g = build_family_graph(cl, ov)
    (u, v, d), = g.graph.edges(data=True)
    assert d["share_source"] == 0.2 and d["share_target"] == pytest.approx(1 / 6)
    cl, ov = _pair(1000, 1200, 100)
    assert build_family_graph(cl, ov).graph.number_of_edges() == 0
    assert build_family_graph(cl, ov, p=0).graph.number_of_edges() == 1
    # exactly at the threshold counts
    cl, ov = _pair(1000, 1000, 150)
    assert build_family_graph(cl, ov).graph.number_of_edges() == 1


def test_three_year_edge_set_and_families():
    clusterings, pair, expected = three_year_families()
    fg = build_family_graph(clusterings, pair, p=0.15)
    assert edge_set(fg) == expected
    assert fg.families == [[(2000, 0), (2000, 1), (2001, 0), (2001, 1), (2002, 1)], [(2002, 0)]]
    series = fg.series(0)
    assert series[2002] == {"statute": 0, "regulation": 1800}
    assert series[2000] == {"statute": 1100, "regulation": 400}
    loose = build_family_graph(clusterings, pair, p=0)
    assert edge_set(loose) == expected | {((2001, 0), (2002, 0))}
    js = fg.to_json()
    assert len(js["edges"]) == 5 and js["families"][1]["series"] == {"2002": {"statute": 9600, "regulation": 0}}


def test_rescale_changes_weights():
    clusterings, pair, _ = three_year_families()
    fg = build_family_graph(clusterings, pair, p=0.15, rescale=True)
    # statute and regulation mass equalised per year; the result is still deterministic
    assert fg.graph.number_of_nodes() == 6
    assert edge_set(fg) == edge_set(build_family_graph(clusterings, pair, p=0.15, rescale=True))


def test_overlaps_split_by_doc_type():
    leaves = {"a": ("statute", 10), "b": ("regulation", 5), "c": ("statute", 0)}
    out = overlaps(leaves, {"a": 1, "b": 1, "c": 1}, {"A": 2, "B": 2}, {"a": "A", "b": "B", "c": "A"})
    assert out == {(1, 2): {"statute": 10, "regulation": 5}}


def series(*pairs, start=2000):
    return {start + i: {"statute": s, "regulation": r} for i, (s, r) in enumerate(pairs)}


def test_composition_classes():
    assert classify_families(series((9, 1), (90, 10))).composition == STATUTE_HEAVY
    assert classify_families(series((1, 9), (10, 90))).composition == REGULATION_HEAVY
    assert classify_families(series((5, 5), (9, 1))).composition == MIXED
    # averaged shares 0.8 exactly: at the threshold
    c = classify_families(series((7, 3), (9, 1)))
    assert c.statute_share == Fraction(4, 5) and c.composition == STATUTE_HEAVY
    assert classify_families(series((1, 4), (1, 4))).composition == REGULATION_HEAVY
    assert classify_families(series((6, 4))).majority == STATUTE_HEAVY
    assert classify_families(series((1, 1))).majority == MIXED


def test_growth_classes():
    assert classify_families(series((100, 100), (200, 1000))).growth == REGULATION_DRIVEN
    assert classify_families(series((100, 100), (1000, 200))).growth == STATUTE_DRIVEN
    assert classify_families(series((100, 100), (600, 600))).growth == MIXED
    flat = classify_families(series((5, 5), (5, 5)))
    assert flat.growth == MIXED and flat.diagnostics
    # shrinking families: share of the net (negative) change
    assert classify_families(series((1000, 200), (100, 100))).growth == STATUTE_DRIVEN
    # absent years count as zero tokens
    late = classify_families({2001: {"statute": 10, "regulation": 90}}, first_year=2000, last_year=2001)
    assert late.growth == REGULATION_DRIVEN
    with pytest.raises(ValueError):
        classify_families({})


def test_tfidf_rankings():
    docs = {0: "bank bank deposit common section", 1: "emission permit common chapter"}
    out = family_tfidf(docs, k=5)
    assert out[0][0][0] == "bank"
    assert out[0][0][1] == pytest.approx(2 * __import__("math").log(2))
    for ranked in out.values():
        names = [t for t, _ in ranked]
        assert "common" not in names and "section" not in names and "chapter" not in names
    assert family_tfidf(docs, k=1)[1] == [("emission", pytest.approx(__import__("math").log(2)))]


def test_tfidf_terms_and_stoplist():
    assert terms("Section 12(a): Bank-holding 3x") == ["section", "bank", "holding"]
    assert {"section", "part", "title", "chapter", "paragraph"} <= default_stoplist()
    assert family_tfidf({0: ["A", "b"], 1: ["c"]}, stoplist=["b"])[0] == [("a", pytest.approx(0.6931471805599453))]
