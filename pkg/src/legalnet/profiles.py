"""Per-unit indicator series and reliance/responsibility ego views."""
import csv
import json
from dataclasses import dataclass, field

from .corpus import tokenize
from .graphcore import quotient, representatives

INDICATORS = ("tokens", "unique_tokens", "items_above", "items_on", "items_below",
              "self_loops", "weighted_in", "weighted_out", "binary_in", "binary_out")
DIP_RATIO = 0.5


class UnitNotFoundError(LookupError):
    pass


@dataclass
class ProfileSeries:
    unit: str
    years: dict = field(default_factory=dict)   # year -> {indicator: value}
    diagnostics: list = field(default_factory=list)

    def rows(self):
        for year in sorted(self.years):
            yield {"year": year, **self.years[year]}

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(("year",) + INDICATORS)
            for row in self.rows():
                w.writerow([row["year"]] + [row[i] for i in INDICATORS])
        return path


def unit_indicators(unit, q, snapshot=None, rep=None) -> dict:
    """The ten indicators of ``unit`` in one quotient graph."""
    d = q.nodes[unit]
    loop = q[unit][unit]["weight"] if q.has_edge(unit, unit) else 0
    if snapshot is not None and rep is not None:
        text = "\n".join(n.text for n in snapshot.nodes() if n.text and rep.get(n.key) == unit)
        unique = tokenize(text).unique_tokens
    else:
        unique = None
    return {
        "tokens": d["tokens"],
        "unique_tokens": unique,
        "items_above": d["items_above"],
        "items_on": d["items_on"],
        "items_below": d["items_below"],
        "self_loops": loop,
        "weighted_in": sum(w for _, _, w in q.in_edges(unit, data="weight")),
        "weighted_out": sum(w for _, _, w in q.out_edges(unit, data="weight")),
        "binary_in": q.in_degree(unit),
        "binary_out": q.out_degree(unit),
    }


def find_dips(years: dict, ratio: float = DIP_RATIO) -> list:
    """Years where tokens fall below ``ratio`` of the previous year."""
    ordered = sorted(years)
    dips = []
    for i in range(1, len(ordered)):
        prev, cur = years[ordered[i - 1]]["tokens"], years[ordered[i]]["tokens"]
        if prev and cur < ratio * prev:
            nxt = years[ordered[i + 1]]["tokens"] if i + 1 < len(ordered) else None
            dips.append({"year": ordered[i], "previous": prev, "tokens": cur,
                         "rebound": nxt is not None and nxt >= ratio * prev})
    return dips


def profile(unit, snapshots, graphs, selector) -> ProfileSeries:
    """Indicator series of one unit over paired snapshots and graphs.

    Years in which the unit does not exist are left out.
    """
    series = ProfileSeries(unit)
    for snap, g in zip(snapshots, graphs):
        if unit not in g:
            continue
        rep = representatives(g, selector)
        q = quotient(g, selector, strict=False)
        if unit not in q:
            continue
        series.years[snap.year] = unit_indicators(unit, q, snap, rep)
    if not series.years:
        raise UnitNotFoundError(f"unit {unit!r} is not present in any snapshot")
    for dip in find_dips(series.years):
        note = "rebounds" if dip["rebound"] else "no rebound"
        series.diagnostics.append(
            f"{dip['year']}: tokens fell from {dip['previous']} to {dip['tokens']} ({note})")
    return series


@dataclass
class EgoView:
    direction: str           # "reliance" or "responsibility"
    center: str
    neighbors: dict = field(default_factory=dict)   # key -> tokens
    edges: list = field(default_factory=list)        # (source, target, weight, ref_class)

    def total_weight(self) -> int:
        return sum(e[2] for e in self.edges)

    def to_json(self) -> dict:
        return {"direction": self.direction, "center": self.center,
                "neighbors": [{"key": k, "tokens": t} for k, t in sorted(self.neighbors.items())],
                "edges": [{"source": s, "target": t, "weight": w, "ref_class": c}
                          for s, t, w, c in self.edges]}

    def to_dot(self) -> str:
        def q(s):
            return json.dumps(str(s))
        lines = [f"digraph {q(self.direction)} {{"]
        for k, t in [(self.center, None)] + sorted(self.neighbors.items()):
            size = "" if t is None else f" tokens={t}"
            lines.append(f"  {q(k)} [label={q(k)}{size}];")
        for s, t, w, c in self.edges:
            lines.append(f"  {q(s)} -> {q(t)} [weight={w} penwidth={w} class={q(c)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def ego_views(unit, q):
    """Outgoing (reliance) and incoming (responsibility) views, self-loops excluded."""
    if unit not in q:
        raise UnitNotFoundError(f"unit {unit!r} is not in the quotient graph")
    out = EgoView("reliance", unit)
    inc = EgoView("responsibility", unit)
    for _, v, d in sorted(q.out_edges(unit, data=True), key=lambda e: str(e[1])):
        if v != unit:
            out.neighbors[v] = q.nodes[v]["tokens"]
            out.edges.append((unit, v, d["weight"], d.get("ref_class")))
    for u, _, d in sorted(q.in_edges(unit, data=True), key=lambda e: str(e[0])):
        if u != unit:
            inc.neighbors[u] = q.nodes[u]["tokens"]
            inc.edges.append((u, unit, d["weight"], d.get("ref_class")))
    return out, inc


def change_table(profiles, year_a: int, year_b: int) -> list:
    """Per-unit indicator changes between two years, largest token increase first."""
    rows = []
    for p in profiles:
        if year_a in p.years and year_b in p.years:
            a, b = p.years[year_a], p.years[year_b]
            rows.append({"unit": p.unit, **{i: (b[i] - a[i]) if a[i] is not None and b[i] is not None else None
                                             for i in INDICATORS}})
    rows.sort(key=lambda r: (-(r["tokens"] or 0), str(r["unit"])))
    return rows
