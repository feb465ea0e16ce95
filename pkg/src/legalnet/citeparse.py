"""Find, parse and resolve explicit atomic references.

The three steps mirror the usual extraction pipeline: regular expressions
locate candidate spans (:func:`find_references`), each span is turned into
one or more :class:`~legalnet.citekeys.CiteKey` (:func:`parse_reference`),
and keys are looked up among the cite keys carried by the snapshot's
seqitems (:func:`resolve_references`).

Patterns live in ``data/patterns/<country>.patterns`` so coverage can be
extended without touching code.
"""
import configparser
import csv
import re
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import NamedTuple, Optional

from .citekeys import CiteKey
from .corpus import SEQITEM, Snapshot


class Span(NamedTuple):
    offset: int
    length: int

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass(frozen=True)
class RefContext:
    """Where a reference occurs; fills in titles/laws the citation leaves implicit."""

    country: str
    collection: Optional[str] = None
    title: Optional[str] = None
    section: Optional[str] = None
    year: Optional[int] = None

    @classmethod
    def of(cls, citekey: Optional[CiteKey], country: str, year=None):
        if citekey is None:
            return cls(country, year=year)
        return cls(country, citekey.collection, citekey.title, citekey.section, year)


@dataclass
class Reference:
    source_key: str
    raw_span: Span
    text: str
    targets: list = field(default_factory=list)
    resolved: list = field(default_factory=list)
    node_key: Optional[str] = None


@dataclass
class Diagnostics:
    found: int = 0
    parsed: int = 0
    deferred: int = 0
    keys: int = 0
    resolved: int = 0
    unresolved: int = 0
    duplicate_targets: int = 0
    no_source: int = 0
    outside_hits: int = 0
    messages: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# pattern files and the law-name registry

@dataclass(frozen=True)
class PatternSet:
    country: str
    version: str
    find: tuple
    reject: tuple


def _read_pattern_file(text: str):
    cp = configparser.ConfigParser(interpolation=configparser.ExtendedInterpolation())
    cp.optionxform = str
    cp.read_string(text)
    find = [(name, cp.get("find", name)) for name in cp.options("find")]
    reject = [cp.get("reject", name) for name in cp.options("reject")] if cp.has_section("reject") else []
    return cp.get("meta", "country"), cp.get("meta", "version"), find, reject


@lru_cache(maxsize=None)
def _raw_patterns(country: str, path: Optional[str] = None):
    if path is None:
        text = (resources.files("legalnet") / "data" / "patterns" / f"{country.lower()}.patterns").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return _read_pattern_file(text)


@lru_cache(maxsize=256)
def load_patterns(country: str, path: Optional[str] = None, law_alternation: str = r"(?!)") -> PatternSet:
    """Compile the pattern file for ``country``.

    ``law_alternation`` is substituted for the ``<<LAW>>`` token (German
    patterns only); the default never matches.
    """
    file_country, version, find, reject = _raw_patterns(country, path)
    if file_country != country:
        raise ValueError(f"pattern file is for {file_country}, not {country}")
    flags = re.VERBOSE
    compiled = tuple((name, re.compile(p.replace("<<LAW>>", law_alternation), flags)) for name, p in find)
    return PatternSet(country, version, compiled, tuple(re.compile(p, flags) for p in reject))


@dataclass(frozen=True)
class LawEntry:
    abbrev: str
    name: str
    valid_from: Optional[int] = None
    valid_to: Optional[int] = None

    def valid(self, year) -> bool:
        if year is None:
            return True
        return (self.valid_from is None or self.valid_from <= year) and \
               (self.valid_to is None or year <= self.valid_to)


class LawRegistry:
    """Law abbreviations and names with validity years (CSV: abbrev,name,valid_from,valid_to)."""

    def __init__(self, entries):
        self.entries = tuple(entries)

    @classmethod
    def from_csv(cls, path):
        entries = []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                entries.append(LawEntry(
                    row["abbrev"].strip(), row["name"].strip(),
                    int(row["valid_from"]) if row.get("valid_from", "").strip() else None,
                    int(row["valid_to"]) if row.get("valid_to", "").strip() else None))
        return cls(entries)

    def abbrevs(self, year=None) -> set:
        return {e.abbrev for e in self.entries if e.valid(year)}

    def surfaces(self, year=None) -> dict:
        """Surface form -> abbreviation for every law valid in ``year``."""
        out = {}
        for e in self.entries:
            if e.valid(year):
                out[e.abbrev] = e.abbrev
                out[e.name] = e.abbrev
        return out

    @lru_cache(maxsize=64)
    def alternation(self, year=None) -> str:
        names = sorted(self.surfaces(year), key=lambda s: (-len(s), s))
        if not names:
            return r"(?!)"
        # genitive endings: "des Kreditwesengesetzes"
        parts = [re.escape(n).replace(r"\ ", r"\s+") + r"(?:es|s|n)?" for n in names]
        return "(?:" + "|".join(parts) + r")(?!\w)"

    def resolve_surface(self, surface: str, year=None) -> Optional[str]:
        table = self.surfaces(year)
        surface = " ".join(surface.split())
        if surface in table:
            return table[surface]
        for suffix in ("es", "s", "n"):
            if surface.endswith(suffix) and surface[: -len(suffix)] in table:
                return table[surface[: -len(suffix)]]
        return None


def _patterns_for(country, registry, year, patterns):
    if patterns is not None:
        return patterns
    if country == "DE" and registry is not None:
        return load_patterns("DE", law_alternation=registry.alternation(year))
    return load_patterns(country)


# --------------------------------------------------------------------------
# find

def _candidates(text, pats):
    for name, rx in pats.find:
        for m in rx.finditer(text):
            if m.end() == m.start():
                continue
            groups = m.groupdict()
            unlocated = ("loc" in groups and groups["loc"] is None) or \
                        ("law" in groups and groups["law"] is None)
            if unlocated and any(r.match(text, m.end()) for r in pats.reject):
                continue
            yield m


def _select(matches):
    chosen = []
    last_end = -1
    for m in sorted(matches, key=lambda m: (m.start(), -(m.end() - m.start()))):
        if m.start() >= last_end:
            chosen.append(m)
            last_end = m.end()
    return chosen


def find_references(text: str, country: str, registry: Optional[LawRegistry] = None,
                    year=None, patterns: Optional[PatternSet] = None) -> list:
    """Non-overlapping candidate reference spans, left to right, longest match first."""
    if not text:
        return []
    pats = _patterns_for(country, registry, year, patterns)
    return [Span(m.start(), m.end() - m.start()) for m in _select(_candidates(text, pats))]


# --------------------------------------------------------------------------
# parse

_SUBDIV = re.compile(r"\s?\([A-Za-z0-9]{1,6}\)")
_US_NUM = re.compile(r"(?<![\w.])\d+[A-Za-z]{0,3}(?:[.–-]\d+[A-Za-z]{0,3})*")
_NAMED = {"code of federal regulations": "CFR", "code of the united states": "USC",
          "united states code": "USC"}

_DE_TOKEN = re.compile(r"""
    (?P<marker>§§?|Art\.|Artt\.|Artikel)
  | (?P<unit>(?:Abs\.|Absatz|Absätze|Satz|Sätze|S\.|Nr\.|Nummer|Nummern|Buchstabe|Buchst\.|Halbsatz|Halbs\.
       |Alternative|Alt\.|Unterabsatz|Unterabs\.|Variante|Var\.)\s*(?:\d+[a-z]?|[a-z]\b))
  | (?P<paren>\(\d+[a-z]?\))
  | (?P<num>\d+(?:[a-z]\b)?)
""", re.VERBOSE)


def _coll(raw: str) -> str:
    return "USC" if raw.upper().replace(".", "").replace(" ", "").startswith("US") else "CFR"


def _dedup(keys):
    seen = set()
    out = []
    for k in keys:
        if k not in seen:
            seen.add(k)
            out.append(k)
    return out


def _parse_us(m, ctx: RefContext) -> list:
    g = m.groupdict()
    numbers = [n.replace("–", "-") for n in _US_NUM.findall(_SUBDIV.sub("", g["list"]))]
    if g.get("title"):
        coll, title = _coll(g["coll"]), g["title"]
    elif g.get("ltitle"):
        title = g["ltitle"]
        coll = _coll(g["lcoll"]) if g.get("lcoll") and not g["lcoll"].lower().startswith(("united", "code")) \
            else _NAMED.get(" ".join((g.get("lcoll") or "").lower().split()), ctx.collection)
    elif g.get("named"):
        named = " ".join(g["named"].lower().split())
        if named.startswith("internal revenue code"):
            coll, title = "USC", "26"
        else:
            coll = _NAMED[named]
            title = ctx.title if ctx.collection == coll else None
    else:
        # "of this title/chapter/part/section" or no location: the enclosing collection
        coll, title = ctx.collection, ctx.title
    if coll not in ("USC", "CFR") or not title:
        return []
    return _dedup(CiteKey(coll, title, n) for n in numbers)


def _parse_de(m, ctx: RefContext, registry, year) -> list:
    law = None
    if m.groupdict().get("law"):
        if registry is None:
            return []
        law = registry.resolve_surface(m.group("law"), year)
    elif ctx.collection == "DE" and ctx.title:
        if registry is None or ctx.title in registry.abbrevs(year):
            law = ctx.title
    if not law:
        return []
    marker = m.group("marker")
    keys = []
    prefix = "Art" if marker.startswith("Art") else "§"
    section_mode = True
    for tok in _DE_TOKEN.finditer(m.group("list")):
        kind = tok.lastgroup
        if kind == "marker":
            prefix = "Art" if tok.group().startswith("Art") else "§"
            section_mode = True
        elif kind in ("unit", "paren"):
            section_mode = False
        elif section_mode:
            keys.append(CiteKey("DE", law, prefix + tok.group().replace(" ", "")))
    return _dedup(keys)


def _match_span(span_text, country, pats):
    for _, rx in pats.find:
        m = rx.fullmatch(span_text)
        if m:
            return m
    return None


def parse_reference(span_text: str, context: RefContext, registry: Optional[LawRegistry] = None,
                    patterns: Optional[PatternSet] = None) -> list:
    """Cite keys named by one reference span.

    Returns an empty list when the span's implicit location cannot be
    resolved from ``context`` (the span is then counted as deferred).
    """
    pats = _patterns_for(context.country, registry, context.year, patterns)
    m = _match_span(span_text, context.country, pats)
    if m is None:
        return []
    if context.country == "DE":
        return _parse_de(m, context, registry, context.year)
    return _parse_us(m, context)


# --------------------------------------------------------------------------
# pipeline

def extract_references(snapshot: Snapshot, registry: Optional[LawRegistry] = None,
                       diagnostics: Optional[Diagnostics] = None) -> list:
    """Find and parse references in every text of ``snapshot``.

    Text below a seqitem is attributed to that seqitem; references in text
    that has no enclosing seqitem are counted in ``no_source`` and dropped.
    """
    diag = diagnostics if diagnostics is not None else Diagnostics()
    pats = _patterns_for(snapshot.country, registry, snapshot.year, None)
    refs = []
    for tree in snapshot.trees:
        stack = [(tree, None)]
        while stack:
            node, seq = stack.pop()
            if node.level_kind == SEQITEM:
                seq = node
            if node.text:
                for span in find_references(node.text, snapshot.country, patterns=pats):
                    diag.found += 1
                    if seq is None:
                        diag.no_source += 1
                        continue
                    raw = node.text[span.offset:span.end]
                    ctx = RefContext.of(seq.citekey, snapshot.country, snapshot.year)
                    keys = parse_reference(raw, ctx, registry, pats)
                    if keys:
                        diag.parsed += 1
                        diag.keys += len(keys)
                    else:
                        diag.deferred += 1
                    refs.append(Reference(seq.key, span, raw, keys, [], node.key))
            stack.extend((c, seq) for c in reversed(node.children))
    return refs


def citekey_index(snapshot: Snapshot) -> dict:
    index = {}
    for node in snapshot.nodes():
        if node.level_kind == SEQITEM and node.citekey is not None:
            index.setdefault(node.citekey, []).append(node.key)
    return index


def resolve_references(refs: list, snapshot: Snapshot,
                       diagnostics: Optional[Diagnostics] = None) -> list:
    diag = diagnostics if diagnostics is not None else Diagnostics()
    index = citekey_index(snapshot)
    out = []
    for ref in refs:
        resolved = []
        for key in ref.targets:
            hits = index.get(key, [])
            if not hits:
                diag.unresolved += 1
                continue
            if len(hits) > 1:
                diag.duplicate_targets += 1
                diag.messages.append(f"cite key {key} maps to {len(hits)} seqitems: {', '.join(hits)}")
            diag.resolved += 1
            resolved.extend(hits)
        out.append(replace(ref, resolved=resolved))
    return out


_LOOSE = re.compile(r"(?<!\w)(?:sections?|sec\.|sect\.|parts?|§)\s+\d", re.IGNORECASE)


def pattern_hits(text: str) -> list:
    """Start offsets of the loose reference pattern used for coverage estimates."""
    return [m.start() for m in _LOOSE.finditer(text or "")]


def estimate_unextracted(texts, spans, diagnostics: Optional[Diagnostics] = None) -> float:
    """Share of explicit references that were extracted.

    ``spans[i]`` lists the extracted spans of ``texts[i]``.  Loose pattern
    hits inside an extracted span are covered; every hit outside counts as
    one missed reference.  Returns extracted / (extracted + missed).
    """
    extracted = 0
    outside = 0
    for text, text_spans in zip(texts, spans):
        text_spans = [Span(*s) for s in text_spans]
        extracted += len(text_spans)
        for pos in pattern_hits(text):
            if not any(s.offset <= pos < s.end for s in text_spans):
                outside += 1
    if diagnostics is not None:
        diagnostics.outside_hits += outside
    if extracted + outside == 0:
        return 1.0
    return extracted / (extracted + outside)
