import pytest

from legalnet.citekeys import CiteKey
from legalnet.citeparse import (Diagnostics, LawEntry, LawRegistry, RefContext, Span,
                                estimate_unextracted, extract_references, find_references,
                                parse_reference, pattern_hits, resolve_references)
from legalnet.corpus import parse_snapshot_xml

from builders import container, section, snapshot

CFR14 = RefContext("US", "CFR", "14", "91.1")

EXAMPLES = [
    ("part 135 of this chapter", {"CFR/14/135"}),
    ("part 375 of this title", {"CFR/14/375"}),
    ("§ 3.5(b) and § 3.5(c)", {"CFR/14/3.5"}),
    ("Section 3.5(b)", {"CFR/14/3.5"}),
    ("49 CFR 1.47(k)", {"CFR/49/1.47"}),
    ("27 CFR 46.155, 178.152 and 179.182", {"CFR/27/46.155", "CFR/27/178.152", "CFR/27/179.182"}),
    ("8 U.S.C. 1182(d)(5)", {"USC/8/1182"}),
]


def keys(found):
    return {str(k) for k in found}


@pytest.mark.parametrize("text, expected", EXAMPLES)
def test_example_strings_found_whole(text, expected):
    body = f"Except as provided in {text}, no person may operate."
    spans = find_references(body, "US")
    assert len(spans) == 1
    assert body[spans[0].offset:spans[0].end] == text
    assert keys(parse_reference(text, CFR14)) == expected


def test_usc_context_resolves_this_title():
    ctx = RefContext("US", "USC", "12", "5363")
    assert keys(parse_reference("section 1843(k)(6)(B) of this title", ctx)) == {"USC/12/1843"}


def test_section_of_named_act_is_not_a_reference():
    text = "the authority provided in section 7 of that Act (12 U.S.C. 3207) to permit"
    spans = find_references(text, "US")
    assert [text[s.offset:s.end] for s in spans] == ["12 U.S.C. 3207"]


def test_list_does_not_swallow_next_collection():
    text = "See 5 U.S.C. 552 and 12 CFR 1.5."
    found = [text[s.offset:s.end] for s in find_references(text, "US")]
    assert found == ["5 U.S.C. 552", "12 CFR 1.5"]


def test_implicit_title_without_context_is_deferred():
    assert parse_reference("section 101 of this title", RefContext("US")) == []


def test_fixture_references(fixtures_dir):
    tree = parse_snapshot_xml((fixtures_dir / "usc12_5363.xml").read_bytes(), country="US")
    snap = snapshot([tree], year=2018)
    diag = Diagnostics()
    refs = resolve_references(extract_references(snap, diagnostics=diag), snap, diag)
    got = sorted((r.source_key, t) for r in refs for t in r.resolved)
    assert got == [("USC12-s5363", "USC12-s1842"), ("USC12-s5363", "USC12-s1843"),
                   ("USC12-s5363", "USC12-s1843"), ("USC12-s5364", "USC12-s3201"),
                   ("USC12-s5364", "USC12-s3207")]
    assert (diag.found, diag.parsed, diag.resolved, diag.unresolved) == (5, 5, 5, 0)
    # text below a seqitem is attributed to it
    assert {r.node_key for r in refs if r.source_key == "USC12-s5363"} == {"USC12-s5363-a", "USC12-s5363-b-1"}


def test_unresolved_and_unsourced_counted():
    tree = container("D", "title", [section("D-s1", "USC/5/1", "See section 99 of this title.")],
                     text="Preamble citing 5 U.S.C. 1.")
    snap = snapshot([tree])
    diag = Diagnostics()
    refs = resolve_references(extract_references(snap, diagnostics=diag), snap, diag)
    assert diag.no_source == 1
    assert diag.unresolved == 1
    assert refs[0].resolved == []


def test_duplicate_citekeys_resolve_to_all_with_message():
    tree = container("D", "title", [section("a", "USC/5/1", "x"), section("b", "USC/5/1", "y"),
                                    section("c", "USC/5/2", "under section 1 of this title")])
    snap = snapshot([tree])
    diag = Diagnostics()
    refs = resolve_references(extract_references(snap), snap, diag)
    assert refs[0].resolved == ["a", "b"]
    assert diag.duplicate_targets == 1 and diag.messages


def _registry():
    return LawRegistry([LawEntry("KWG", "Kreditwesengesetz", None, None),
                        LawEntry("BGB", "Bürgerliches Gesetzbuch", None, None),
                        LawEntry("AltG", "Altgesetz", None, 1999)])


def test_german_references():
    reg = _registry()
    ctx = RefContext("DE", "DE", "KWG", "§1", 2005)
    text = "Die Pflicht nach § 25a Absatz 1 Satz 3 KWG und § 433 BGB gilt entsprechend."
    spans = find_references(text, "DE", reg, 2005)
    found = [text[s.offset:s.end] for s in spans]
    assert len(found) == 2
    assert keys(parse_reference(found[0], ctx, reg)) == {"DE/KWG/§25a"}
    assert keys(parse_reference(found[1], ctx, reg)) == {"DE/BGB/§433"}
    # a bare section resolves within the citing law
    assert keys(parse_reference("§ 10", ctx, reg)) == {"DE/KWG/§10"}


def test_german_registry_validity_window():
    reg = _registry()
    assert "AltG" in reg.abbrevs(1995)
    assert "AltG" not in reg.abbrevs(2005)


def test_registry_from_csv(tmp_path):
    p = tmp_path / "laws.csv"
    p.write_text("abbrev,name,valid_from,valid_to\nKWG,Kreditwesengesetz,1961,\n", encoding="utf-8")
    reg = LawRegistry.from_csv(p)
    assert reg.abbrevs(2000) == {"KWG"}
    assert reg.abbrevs(1950) == set()


def test_estimator_nine_in_one_out():
    texts = [f"as required by section {i} of this title" for i in range(1, 10)]
    texts.append("see sec. 4 of the old act")
    spans = [find_references(t, "US") for t in texts]
    assert sum(len(s) for s in spans) == 9
    diag = Diagnostics()
    assert estimate_unextracted(texts, spans, diag) == 0.9
    assert diag.outside_hits == 1


def test_estimator_empty_and_pattern():
    assert estimate_unextracted([], []) == 1.0
    text = "Sections 3 and part 4; §5 and SECT. 9"
    assert pattern_hits(text) == [0, text.index("part"), text.index("SECT")]
    # the loose pattern requires whitespace before the digit
    assert len(pattern_hits("Sections 3 and part 4; § 5 and SECT. 9")) == 4
    assert estimate_unextracted(["section 1"], [[Span(0, 9)]]) == 1.0


def test_citekey_parse_and_country():
    k = CiteKey.parse("DE/BGB/§433")
    assert (k.collection, k.title, k.section, k.country) == ("DE", "BGB", "§433", "DE")
    assert str(CiteKey("USC", "12", "5363")) == "USC/12/5363"
    with pytest.raises(ValueError):
        CiteKey.parse("XYZ/1/2")
    with pytest.raises(ValueError):
        CiteKey.parse("USC/12")
