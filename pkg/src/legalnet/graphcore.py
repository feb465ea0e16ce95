"""Snapshot multigraphs, quotient graphs and their export.

A legal graph is a :class:`networkx.MultiDiGraph` whose nodes are corpus
node keys and whose edges carry ``edge_type`` = ``hierarchy`` (parent to
child) or ``reference`` (seqitem to seqitem, with ``ref_class``).
"""
import csv
import gzip
import io
from dataclasses import dataclass
from pathlib import Path

import networkx as nx

from .corpus import CONTAINER, SEQITEM, SUBSEQITEM, Snapshot, tokenize

HIERARCHY = "hierarchy"
REFERENCE = "reference"
REFERENCE_CLASSES = ("lateral_statute", "lateral_regulation", "upward", "downward")

INT_COLUMNS = {"level_depth", "tokens", "unique_tokens", "tokens_statute", "tokens_regulation",
               "weight", "items_above", "items_on", "items_below", "year"}


class StructuralError(ValueError):
    pass


def reference_class(source_doc_type: str, target_doc_type: str) -> str:
    if source_doc_type == target_doc_type:
        return f"lateral_{source_doc_type}"
    return "upward" if source_doc_type == "regulation" else "downward"


def build_graph(snapshot: Snapshot, refs=(), diagnostics=None) -> nx.MultiDiGraph:
    """Hierarchy forest plus one reference edge per resolved (source, target) occurrence."""
    g = nx.MultiDiGraph(country=snapshot.country, year=snapshot.year)
    for tree in snapshot.trees:
        for node in tree.iter():
            stats = tokenize(node.text)
            g.add_node(node.key, level_kind=node.level_kind, level=node.level,
                       level_depth=node.level_depth, doc_type=node.doc_type,
                       heading=node.heading,
                       citekey=str(node.citekey) if node.citekey else None,
                       tokens=stats.tokens, unique_tokens=stats.unique_tokens)
            for child in node.children:
                g.add_edge(node.key, child.key, edge_type=HIERARCHY)
    rejected = 0
    for ref in refs:
        src = g.nodes.get(ref.source_key)
        if src is None or src["level_kind"] != SEQITEM:
            rejected += len(ref.resolved)
            continue
        for target in ref.resolved:
            tgt = g.nodes.get(target)
            if tgt is None or tgt["level_kind"] != SEQITEM:
                rejected += 1
                continue
            g.add_edge(ref.source_key, target, edge_type=REFERENCE,
                       ref_class=reference_class(src["doc_type"], tgt["doc_type"]))
    if rejected and diagnostics is not None:
        diagnostics.messages.append(f"{rejected} reference endpoint(s) not in snapshot")
    g.graph["rejected_references"] = rejected
    return g


def reference_edges(g):
    for u, v, data in g.edges(data=True):
        if data.get("edge_type") == REFERENCE:
            yield u, v, data


def reference_subgraph(g, doc_types=None) -> nx.MultiDiGraph:
    """Seqitems (optionally of the given doc types) and the references among them."""
    doc_types = set(doc_types) if doc_types else None
    sub = nx.MultiDiGraph(**g.graph)
    for n, data in g.nodes(data=True):
        if data["level_kind"] == SEQITEM and (doc_types is None or data["doc_type"] in doc_types):
            sub.add_node(n, **data)
    for u, v, data in reference_edges(g):
        if u in sub and v in sub:
            sub.add_edge(u, v, **data)
    return sub


# --------------------------------------------------------------------------
# quotient graphs

@dataclass(frozen=True)
class LevelSelector:
    """Which structural levels act as representatives.

    Nodes below a representative map to their closest representative
    ancestor.  Nodes in subtrees without any representative are merged into
    the highest ancestor whose subtree contains no representative.
    """

    levels: tuple = ("chapter",)

    @classmethod
    def for_country(cls, country: str) -> "LevelSelector":
        # German laws without books fall back to the law's root
        return cls(("book",)) if country == "DE" else cls(("chapter",))


def _roots(g):
    has_parent = {v for _, v, d in g.edges(data=True) if d.get("edge_type") == HIERARCHY}
    return sorted(n for n in g.nodes if n not in has_parent)


def _children(g, n):
    return [v for _, v, d in g.out_edges(n, data=True) if d.get("edge_type") == HIERARCHY]


def representatives(g, selector: LevelSelector) -> dict:
    """Map every node that lies on or below the selected level to its representative."""
    levels = set(selector.levels)
    contains = {}
    order = []
    for root in _roots(g):
        stack = [root]
        while stack:
            n = stack.pop()
            order.append(n)
            stack.extend(_children(g, n))
    for n in reversed(order):
        contains[n] = g.nodes[n].get("level") in levels or any(contains[c] for c in _children(g, n))
    rep = {}
    for root in _roots(g):
        stack = [(root, None)]
        while stack:
            n, above = stack.pop()
            if g.nodes[n].get("level") in levels:
                current = n
            elif above is not None:
                current = above
            elif not contains[n]:
                current = n
            else:
                current = None
            if current is not None:
                rep[n] = current
            stack.extend((c, current) for c in _children(g, n))
    return rep


def quotient(g, selector: LevelSelector, strict: bool = True) -> nx.DiGraph:
    """Aggregate references onto representatives; weights count references.

    References between members of the same representative become
    self-loops.  Seqitems that cannot be mapped raise
    :class:`StructuralError` when ``strict``; container text above the
    selected level is dropped and reported in ``graph['dropped_tokens']``.
    """
    rep = representatives(g, selector)
    q = nx.DiGraph(country=g.graph.get("country"), year=g.graph.get("year"),
                   levels=",".join(selector.levels))
    dropped = 0
    for n, data in g.nodes(data=True):
        r = rep.get(n)
        if r is None:
            if data["level_kind"] != CONTAINER and strict:
                raise StructuralError(f"{data['level_kind']} {n!r} has no representative")
            dropped += data["tokens"]
            continue
        if r not in q:
            rd = g.nodes[r]
            q.add_node(r, level=rd.get("level"), heading=rd.get("heading"), doc_type=rd["doc_type"],
                       tokens=0, tokens_statute=0, tokens_regulation=0,
                       items_above=0, items_on=0, items_below=0)
        attrs = q.nodes[r]
        attrs["tokens"] += data["tokens"]
        attrs[f"tokens_{data['doc_type']}"] += data["tokens"]
        if n != r:
            field = {CONTAINER: "items_above", SEQITEM: "items_on", SUBSEQITEM: "items_below"}[data["level_kind"]]
            attrs[field] += 1
    for u, v, data in reference_edges(g):
        ru, rv = rep.get(u), rep.get(v)
        if ru is None or rv is None:
            continue
        if q.has_edge(ru, rv):
            q[ru][rv]["weight"] += 1
        else:
            q.add_edge(ru, rv, weight=1,
                       ref_class=reference_class(q.nodes[ru]["doc_type"], q.nodes[rv]["doc_type"]))
    q.graph["dropped_tokens"] = dropped
    return q


# --------------------------------------------------------------------------
# export / import

def _cell(value):
    if value is None:
        return ""
    return str(value)


def _rows_to_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _write(path: Path, data: bytes, compress: bool):
    if compress:
        with open(path, "wb") as raw:
            with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as gz:
                gz.write(data)
    else:
        path.write_bytes(data)


def node_table(g):
    cols = sorted({k for _, d in g.nodes(data=True) for k in d})
    rows = [[_cell(n)] + [_cell(d.get(c)) for c in cols] for n, d in g.nodes(data=True)]
    rows.sort(key=lambda r: r[0])
    return ["key"] + cols, rows


def edge_table(g):
    cols = sorted({k for *_, d in g.edges(data=True) for k in d})
    rows = [[_cell(u), _cell(v)] + [_cell(d.get(c)) for c in cols] for u, v, d in g.edges(data=True)]
    rows.sort()
    return ["source", "target"] + cols, rows


def export_csv(g, out_dir, prefix: str = "", compress: bool = False):
    """Write ``<prefix>nodes.csv`` and ``<prefix>edges.csv`` (``.gz`` when compressed)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = ".csv.gz" if compress else ".csv"
    paths = out_dir / f"{prefix}nodes{ext}", out_dir / f"{prefix}edges{ext}"
    _write(paths[0], _rows_to_bytes(*node_table(g)), compress)
    _write(paths[1], _rows_to_bytes(*edge_table(g)), compress)
    return paths


def _read_rows(path: Path):
    data = path.read_bytes()
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    rows = list(csv.reader(io.StringIO(data.decode("utf-8"), newline="")))
    return rows[0], rows[1:]


def _typed(col, value):
    if value == "":
        return None
    if col in INT_COLUMNS:
        return int(value)
    return value


def import_csv(nodes_path, edges_path, multigraph: bool = True):
    """Inverse of :func:`export_csv`."""
    g = nx.MultiDiGraph() if multigraph else nx.DiGraph()
    header, rows = _read_rows(Path(nodes_path))
    for row in rows:
        g.add_node(row[0], **{c: _typed(c, v) for c, v in zip(header[1:], row[1:])})
    header, rows = _read_rows(Path(edges_path))
    for row in rows:
        attrs = {c: _typed(c, v) for c, v in zip(header[2:], row[2:]) if v != ""}
        g.add_edge(row[0], row[1], **attrs)
    return g


def export_graphml(g, path):
    """GraphML with nodes and edges in sorted order; missing values become ''."""
    h = g.__class__()
    h.graph.update({k: _cell(v) for k, v in g.graph.items()})
    for n, d in sorted(g.nodes(data=True), key=lambda x: str(x[0])):
        h.add_node(n, **{k: ("" if v is None else v) for k, v in sorted(d.items())})
    edges = sorted(g.edges(data=True), key=lambda e: (str(e[0]), str(e[1]), sorted((k, _cell(v)) for k, v in e[2].items())))
    for u, v, d in edges:
        h.add_edge(u, v, **{k: ("" if x is None else x) for k, x in sorted(d.items())})
    nx.write_graphml(h, path)
    return path


def graph_signature(g):
    """Order-free description of a graph, used to compare round trips."""
    nodes = sorted((str(n), tuple(sorted((k, v) for k, v in d.items() if v is not None)))
                   for n, d in g.nodes(data=True))
    edges = sorted((str(u), str(v), tuple(sorted((k, x) for k, x in d.items() if x is not None)))
                   for u, v, d in g.edges(data=True))
    return nodes, edges
