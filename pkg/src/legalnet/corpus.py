"""Document model, XML ingestion, tokenization and snapshot series.

Normalized XML schema
---------------------
``document``   root of one document tree (a container at depth 0).  Carries
               ``key`` and optionally ``doc_type`` (statute|regulation),
               ``heading`` and ``level`` (e.g. ``title``).
``item``       container above the sequence level (chapter, part, ...).
``seqitem``    sequence-level element (section, §, article); may carry
               ``citekey`` in ``collection/title/section`` form.
``subseqitem`` element below the sequence level.
``text``       character content of its parent element.

Every structural element needs a unique ``key``.  ``level`` names the
structural unit (``chapter``, ``part``, ``book`` ...) and is what level
selectors match against.
"""
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional
from xml.parsers import expat
from xml.sax.saxutils import escape, quoteattr

from .citekeys import CiteKey

CONTAINER = "container"
SEQITEM = "seqitem"
SUBSEQITEM = "subseqitem"
LEVEL_KINDS = (CONTAINER, SEQITEM, SUBSEQITEM)
DOC_TYPES = ("statute", "regulation")
COUNTRIES = ("US", "DE")

_TAG_KIND = {"document": CONTAINER, "item": CONTAINER,
             "seqitem": SEQITEM, "subseqitem": SUBSEQITEM}
_ATTRS = {"key", "citekey", "heading", "level", "doc_type"}


class CorpusError(ValueError):
    """Base class for ingestion errors; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CorpusParseError(CorpusError):
    pass


class SchemaError(CorpusError):
    pass


@dataclass
class CorpusNode:
    key: str
    level_kind: str
    level_depth: int = 0
    level: Optional[str] = None
    heading: Optional[str] = None
    citekey: Optional[CiteKey] = None
    text: Optional[str] = None
    doc_type: str = "statute"
    children: list = field(default_factory=list)

    def iter(self) -> Iterator["CorpusNode"]:
        """Pre-order traversal (document order)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def structure(self):
        """Hashable nested view used for structural comparison."""
        return (self.key, self.level_kind, self.level_depth, self.level,
                self.heading, self.citekey, self.text, self.doc_type,
                tuple(c.structure() for c in self.children))


@dataclass(frozen=True)
class TokenStats:
    tokens: int
    unique_tokens: int


def tokenize(text: Optional[str], casefold: bool = True) -> TokenStats:
    """Whitespace tokenization; unique tokens are counted after case folding."""
    if not text:
        return TokenStats(0, 0)
    toks = text.split()
    if casefold:
        return TokenStats(len(toks), len({t.casefold() for t in toks}))
    return TokenStats(len(toks), len(set(toks)))


@dataclass
class Snapshot:
    country: str
    year: int
    trees: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def nodes(self) -> Iterator[CorpusNode]:
        for tree in self.trees:
            yield from tree.iter()

    def index(self) -> dict:
        return {n.key: n for n in self.nodes()}

    def parents(self) -> dict:
        out = {}
        for tree in self.trees:
            out[tree.key] = None
            for node in tree.iter():
                for child in node.children:
                    out[child.key] = node.key
        return out

    def root_keys(self) -> list:
        return [t.key for t in self.trees]


# --------------------------------------------------------------------------
# XML

class _Builder:
    def __init__(self, parser, doc_type, country):
        self.p = parser
        self.doc_type = doc_type
        self.country = country
        self.root = None
        self.stack = []
        self.in_text = False
        self.text_buf = []
        self.texts = {}
        self.seen = set()

    def line(self):
        return self.p.CurrentLineNumber

    def start(self, tag, attrs):
        if self.in_text:
            raise SchemaError(f"element <{tag}> inside <text>", self.line())
        if tag == "text":
            if not self.stack:
                raise SchemaError("<text> outside a document", self.line())
            self.in_text = True
            self.text_buf = []
            return
        kind = _TAG_KIND.get(tag)
        if kind is None:
            raise SchemaError(f"unknown element <{tag}>", self.line())
        unknown = set(attrs) - _ATTRS
        if unknown:
            raise SchemaError(f"unknown attribute(s) {sorted(unknown)} on <{tag}>", self.line())
        if tag == "document":
            if self.stack or self.root is not None:
                raise SchemaError("<document> must be the root element", self.line())
            doc_type = self.doc_type or attrs.get("doc_type")
            if doc_type not in DOC_TYPES:
                raise SchemaError(f"invalid or missing doc_type {doc_type!r}", self.line())
            self.doc_type = doc_type
        elif not self.stack:
            raise SchemaError(f"root element must be <document>, got <{tag}>", self.line())
        key = attrs.get("key", "")
        if not key:
            raise SchemaError(f"<{tag}> without key attribute", self.line())
        if key in self.seen:
            raise SchemaError(f"duplicate key {key!r}", self.line())
        self.seen.add(key)
        kinds_above = {n.level_kind for n in self.stack}
        if kind == SEQITEM and (SEQITEM in kinds_above or SUBSEQITEM in kinds_above):
            raise SchemaError(f"seqitem {key!r} nested in a seqitem", self.line())
        if kind == SUBSEQITEM and SEQITEM not in kinds_above:
            raise SchemaError(f"subseqitem {key!r} without seqitem ancestor", self.line())
        if kind == CONTAINER and (SEQITEM in kinds_above or SUBSEQITEM in kinds_above):
            raise SchemaError(f"container {key!r} below sequence level", self.line())
        citekey = None
        if attrs.get("citekey"):
            if kind != SEQITEM:
                raise SchemaError(f"citekey on non-seqitem {key!r}", self.line())
            try:
                citekey = CiteKey.parse(attrs["citekey"])
            except ValueError as exc:
                raise SchemaError(str(exc), self.line()) from None
        node = CorpusNode(key=key, level_kind=kind, level_depth=len(self.stack),
                          level=attrs.get("level"), heading=attrs.get("heading"),
                          citekey=citekey, doc_type=self.doc_type)
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.root = node
        self.stack.append(node)

    def end(self, tag):
        if tag == "text":
            self.in_text = False
            self.texts.setdefault(id(self.stack[-1]), []).append("".join(self.text_buf))
            return
        node = self.stack.pop()
        parts = self.texts.pop(id(node), None)
        if parts is not None:
            node.text = "\n".join(parts)

    def chars(self, data):
        if self.in_text:
            self.text_buf.append(data)
        elif data.strip():
            raise SchemaError("character data outside <text>", self.line())


def parse_snapshot_xml(data, doc_type: Optional[str] = None,
                       country: Optional[str] = None) -> CorpusNode:
    """Parse one document tree from normalized XML bytes (or str)."""
    if country is not None and country not in COUNTRIES:
        raise ValueError(f"unknown country {country!r}")
    parser = expat.ParserCreate("UTF-8")
    builder = _Builder(parser, doc_type, country)
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars
    parser.buffer_text = True
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise CorpusParseError(expat.ErrorString(exc.code), exc.lineno) from None
    if builder.root is None:
        raise SchemaError("empty document")
    return builder.root


def serialize(root: CorpusNode) -> bytes:
    """Canonical XML for one tree; parses back to an identical structure."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>\n']

    def emit(node, indent):
        tag = "document" if indent == 0 else (
            "item" if node.level_kind == CONTAINER else node.level_kind)
        attrs = [("key", node.key)]
        if indent == 0:
            attrs.append(("doc_type", node.doc_type))
        for name in ("level", "heading"):
            value = getattr(node, name)
            if value is not None:
                attrs.append((name, value))
        if node.citekey is not None:
            attrs.append(("citekey", str(node.citekey)))
        pad = "  " * indent
        head = pad + "<" + tag + "".join(f" {k}={quoteattr(v)}" for k, v in attrs)
        if node.text is None and not node.children:
            out.append(head + "/>\n")
            return
        out.append(head + ">\n")
        if node.text is not None:
            out.append(f"{pad}  <text>{escape(node.text)}</text>\n")
        for child in node.children:
            emit(child, indent + 1)
        out.append(f"{pad}</{tag}>\n")

    emit(root, 0)
    return "".join(out).encode("utf-8")


# --------------------------------------------------------------------------
# series

def forward_fill(series: list) -> list:
    """Fill gaps in root trees from the closest previous year.

    A root missing in year ``y`` is filled only if it exists both before and
    after ``y``; native roots are never touched.
    """
    series = sorted(series, key=lambda s: s.year)
    years_of = {}
    for i, snap in enumerate(series):
        for key in snap.root_keys():
            years_of.setdefault(key, []).append(i)
    out = []
    latest = {}
    for i, snap in enumerate(series):
        trees = list(snap.trees)
        prov = dict(snap.provenance)
        for key in snap.root_keys():
            prov.setdefault(key, "native")
            latest[key] = next(t for t in snap.trees if t.key == key)
        present = set(snap.root_keys())
        for key in sorted(years_of):
            if key in present:
                continue
            idx = years_of[key]
            if idx[0] < i < idx[-1]:
                trees.append(latest[key])
                prov[key] = "forward_filled"
        out.append(Snapshot(snap.country, snap.year, trees, prov))
    return out


def _safe_name(key: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", key)


def load_country(root, country: str, years=None, fill: bool = True) -> list:
    """Read ``<root>/<country>/<year>/*.xml`` into a contiguous snapshot series."""
    base = Path(root) / country
    if not base.is_dir():
        raise FileNotFoundError(f"no corpus directory {base}")
    found = sorted(int(p.name) for p in base.iterdir() if p.is_dir() and p.name.isdigit())
    if years is not None:
        lo, hi = years
        found = [y for y in found if lo <= y <= hi]
    if not found:
        raise FileNotFoundError(f"no snapshot years under {base}")
    series = []
    for year in range(found[0], found[-1] + 1):
        snap = Snapshot(country, year)
        ydir = base / str(year)
        if ydir.is_dir():
            for path in sorted(ydir.glob("*.xml")):
                try:
                    tree = parse_snapshot_xml(path.read_bytes(), country=country)
                except CorpusError as exc:
                    raise type(exc)(f"{path}: {exc}") from None
                snap.trees.append(tree)
                snap.provenance[tree.key] = "native"
        series.append(snap)
    _check_unique(series)
    return forward_fill(series) if fill else series


def _check_unique(series):
    for snap in series:
        seen = set()
        for node in snap.nodes():
            if node.key in seen:
                raise SchemaError(f"duplicate key {node.key!r} in {snap.country} {snap.year}")
            seen.add(node.key)


def write_store(series: list, out_dir) -> dict:
    """Write canonical XML for every snapshot plus ``manifest.json``."""
    out_dir = Path(out_dir)
    entries = []
    for snap in series:
        ydir = out_dir / snap.country / str(snap.year)
        ydir.mkdir(parents=True, exist_ok=True)
        roots = []
        for tree in sorted(snap.trees, key=lambda t: t.key):
            data = serialize(tree)
            name = _safe_name(tree.key) + ".xml"
            (ydir / name).write_bytes(data)
            roots.append({"key": tree.key, "file": name,
                          "provenance": snap.provenance.get(tree.key, "native"),
                          "sha256": hashlib.sha256(data).hexdigest()})
        entries.append({"country": snap.country, "year": snap.year, "roots": roots})
    manifest = {"snapshots": entries}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest

