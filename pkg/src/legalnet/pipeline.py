"""Stage functions shared by the CLI subcommands.

Every stage reads through a :class:`Workspace`, which caches loaded
snapshots, references and graphs per country, and writes its artifacts
below the output directory.  Output bytes depend only on the inputs and the
configuration.
"""
import csv
import hashlib
import io
import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from . import citeparse, graphcore, macrostats, microstars, partcmp, profiles
from .corpus import load_country, write_store
from .mesoclust import (Clustering, align, build_family_graph, classify_families, consensus_cluster,
                        family_tfidf, overlaps)
from .mesoclust.families import cluster_of_leaves, leaf_tokens

log = logging.getLogger(__name__)

ENV_INPUT_ROOT = "LEGALNET_INPUT_ROOT"


def bundled_corpus() -> Path:
    return Path(str(resources.files("legalnet") / "data" / "synthetic"))


@dataclass
class RunConfig:
    countries: tuple = ("US", "DE")
    years: Optional[tuple] = None
    levels: dict = field(default_factory=lambda: {"US": ["chapter"], "DE": ["book"]})
    runs: int = 1000
    agreement: float = 0.95
    prefer: Optional[int] = 100
    seed: int = 0
    slack: float = 0.01
    threshold: float = 0.15
    rescale: bool = False
    min_size: int = 10
    ratio: int = 10
    density_cap: float = 0.05
    baseline: Optional[int] = None
    compress: bool = False
    tfidf_k: int = 10
    jobs: int = 1

    def validate(self):
        problems = []
        if self.runs < 1:
            problems.append("runs must be >= 1")
        if not 0 < self.agreement <= 1:
            problems.append("agreement must be in (0, 1]")
        if self.prefer is not None and self.prefer < 1:
            problems.append("prefer must be >= 1")
        if not 0 <= self.threshold <= 1:
            problems.append("threshold must be in [0, 1]")
        if self.min_size < 2:
            problems.append("min_size must be >= 2")
        if self.ratio <= 0:
            problems.append("ratio must be positive")
        if not 0 <= self.density_cap < 1:
            problems.append("density_cap must be in [0, 1)")
        if self.slack < 0:
            problems.append("slack must be >= 0")
        if self.jobs < 1:
            problems.append("jobs must be >= 1")
        for c in self.countries:
            if c not in ("US", "DE"):
                problems.append(f"unknown country {c!r}")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["countries"] = list(self.countries)
        d["years"] = list(self.years) if self.years else None
        d.pop("jobs")   # parallelism never changes results
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def selector(self, country) -> graphcore.LevelSelector:
        return graphcore.LevelSelector(tuple(self.levels.get(country, ["chapter"])))


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Workspace:
    def __init__(self, input_root, out_dir, config: RunConfig):
        self.input_root = Path(input_root)
        self.out = Path(out_dir)
        self.config = config
        self.written = []
        self._series = {}
        self._graphs = {}
        self._refs = {}
        self._clusters = {}

    # io ----------------------------------------------------------------
    def path(self, *parts) -> Path:
        p = self.out.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def record(self, path: Path) -> Path:
        self.written.append(Path(path))
        return path

    def write_bytes(self, rel, data: bytes) -> Path:
        p = self.path(*rel.split("/"))
        p.write_bytes(data)
        return self.record(p)

    def write_json(self, rel, obj) -> Path:
        return self.write_bytes(rel, (json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode())

    def write_csv(self, rel, header, rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)
        return self.write_bytes(rel, buf.getvalue().encode("utf-8"))

    def input_files(self):
        for country in self.config.countries:
            base = self.input_root / country
            if base.is_dir():
                yield from sorted(p for p in base.rglob("*") if p.is_file())

    def write_manifest(self, command: str, name: str = "manifest.json"):
        manifest = {
            "command": command,
            "config": self.config.to_dict(),
            "config_sha256": self.config.digest(),
            "inputs": {str(p.relative_to(self.input_root)): sha256_file(p) for p in self.input_files()},
            "outputs": {str(p.relative_to(self.out)): sha256_file(p)
                        for p in sorted(set(self.written)) if p.name != name},
        }
        p = self.path(name)
        p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return p

    # cached stages -------------------------------------------------------
    def registry(self, country):
        path = self.input_root / country / "laws.csv"
        return citeparse.LawRegistry.from_csv(path) if path.is_file() else None

    def series(self, country):
        if country not in self._series:
            self._series[country] = load_country(self.input_root, country, self.config.years)
        return self._series[country]

    def references(self, country):
        if country not in self._refs:
            reg = self.registry(country)
            out = []
            for snap in self.series(country):
                diag = citeparse.Diagnostics()
                refs = citeparse.extract_references(snap, reg, diag)
                refs = citeparse.resolve_references(refs, snap, diag)
                out.append((snap, refs, diag))
            self._refs[country] = out
        return self._refs[country]

    def graphs(self, country):
        if country not in self._graphs:
            self._graphs[country] = [graphcore.build_graph(snap, refs, diag)
                                     for snap, refs, diag in self.references(country)]
        return self._graphs[country]

    def quotients(self, country):
        sel = self.config.selector(country)
        return [graphcore.quotient(g, sel, strict=False) for g in self.graphs(country)]

    def clusterings(self, country):
        if country not in self._clusters:
            cfg = self.config
            out = {}
            for q in self.quotients(country):
                out[q.graph["year"]] = consensus_cluster(
                    q, runs=cfg.runs, agreement=cfg.agreement, preferred_modules=cfg.prefer,
                    master_seed=cfg.seed, jobs=cfg.jobs, slack=cfg.slack)
            self._clusters[country] = out
        return self._clusters[country]


# --------------------------------------------------------------------------
# stages

def stage_ingest(ws: Workspace):
    series = [snap for country in ws.config.countries for snap in ws.series(country)]
    manifest = write_store(series, ws.out / "store")
    ws.record(ws.out / "store" / "manifest.json")
    for entry in manifest["snapshots"]:
        for root in entry["roots"]:
            ws.record(ws.out / "store" / entry["country"] / str(entry["year"]) / root["file"])


def stage_extract(ws: Workspace):
    for country in ws.config.countries:
        summary = {}
        for snap, refs, diag in ws.references(country):
            rows = [[r.source_key, r.node_key, r.raw_span.offset, r.raw_span.length, r.text,
                     ";".join(map(str, r.targets)), ";".join(r.resolved)] for r in refs]
            rows.sort(key=lambda r: (r[0], r[1], r[2]))
            ws.write_csv(f"refs/{country}-{snap.year}.csv",
                         ["source", "node", "offset", "length", "text", "targets", "resolved"], rows)
            summary[str(snap.year)] = diag.to_dict()
        ws.write_json(f"refs/{country}-diagnostics.json", summary)


def stage_graph(ws: Workspace):
    for country in ws.config.countries:
        for g, q in zip(ws.graphs(country), ws.quotients(country)):
            year = g.graph["year"]
            base = ws.out / "graphs" / country / str(year)
            for p in graphcore.export_csv(g, base, "", ws.config.compress):
                ws.record(p)
            for p in graphcore.export_csv(q, base, "quotient_", ws.config.compress):
                ws.record(p)
            ws.record(graphcore.export_graphml(q, ws.path("graphs", country, str(year), "quotient.graphml")))


def stage_growth(ws: Workspace):
    rows, deltas = [], []
    for country in ws.config.countries:
        series = macrostats.growth(ws.graphs(country), ws.config.baseline)
        for r in series.rows():
            rel = "" if r["relative"] is None else repr(r["relative"])
            rows.append([r["country"], r["scope"], r["metric"], r["year"], r["value"], rel])
        metrics = sorted({(k[1], k[2]) for k in series.values})
        for scope, metric in metrics:
            pct = series.delta_pct(country, scope, metric)
            deltas.append([country, scope, metric, series.delta(country, scope, metric),
                           "" if pct is None else f"{pct:.6f}"])
    ws.write_csv("growth/growth.csv", ["country", "scope", "metric", "year", "value", "relative"], rows)
    ws.write_csv("growth/delta.csv", ["country", "scope", "metric", "delta", "delta_pct"], deltas)


def stage_connectivity(ws: Workspace):
    comp_rows, rocket_rows, degree_rows = [], [], []
    notes = {}
    for country in ws.config.countries:
        for g in ws.graphs(country):
            year = g.graph["year"]
            for scope, types in (("statute", ("statute",)), ("regulation", ("regulation",)), ("all", None)):
                c = macrostats.components(g, types).to_dict()
                comp_rows.append([country, scope, year] + [c[k] for k in sorted(c)])
            sub = graphcore.reference_subgraph(g)
            if sub.number_of_nodes():
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    r = macrostats.rocket(g)
                notes[f"{country}-{year}"] = r.diagnostics
                for part in ("scc", "in_", "out", "tt"):
                    for node in sorted(getattr(r, part)):
                        rocket_rows.append([country, year, node, part.rstrip("_")])
            for direction in ("in", "out"):
                d = macrostats.degree_distribution(g, direction)
                for deg, cnt in d.counts.items():
                    degree_rows.append([country, year, direction, deg, cnt])
    keys = sorted(macrostats.ComponentStats(0, 0, 0, 0, 0, 0).to_dict())
    ws.write_csv("connectivity/components.csv", ["country", "scope", "year"] + keys, comp_rows)
    ws.write_csv("connectivity/rocket.csv", ["country", "year", "node", "part"], rocket_rows)
    ws.write_json("connectivity/rocket-diagnostics.json", notes)
    ws.write_csv("connectivity/degrees.csv", ["country", "year", "direction", "degree", "count"], degree_rows)


def stage_cluster(ws: Workspace):
    for country in ws.config.countries:
        for year, cl in ws.clusterings(country).items():
            ws.record(cl.write_csv(ws.path("clusters", f"{country}-{year}.csv")))


def _alignments(ws, country):
    series = ws.series(country)
    graphs = ws.graphs(country)
    for (s0, g0), (s1, g1) in zip(zip(series, graphs), list(zip(series, graphs))[1:]):
        yield s0, g0, s1, g1, align(s0, s1, g0, g1)


def stage_align(ws: Workspace):
    for country in ws.config.countries:
        for s0, _, s1, _, al in _alignments(ws, country):
            rows = sorted([v, w, al.passes[v]] for v, w in al.mapping.items())
            ws.write_csv(f"alignment/{country}-{s0.year}-{s1.year}.csv", ["source", "target", "pass"], rows)


def stage_families(ws: Workspace):
    cfg = ws.config
    for country in cfg.countries:
        clusters = ws.clusterings(country)
        sel = cfg.selector(country)
        pair = {}
        for s0, g0, s1, g1, al in _alignments(ws, country):
            c0 = cluster_of_leaves(g0, sel, clusters[s0.year])
            c1 = cluster_of_leaves(g1, sel, clusters[s1.year])
            pair[s0.year] = overlaps(leaf_tokens(s0, g0), c0, c1, al)
        fg = build_family_graph(clusters, pair, cfg.threshold, cfg.rescale)
        ws.write_json(f"families/{country}-graph.json", fg.to_json())
        years = sorted(clusters)
        rows = []
        texts = {}
        for i in range(len(fg.families)):
            cls = classify_families(fg.series(i), years[0], years[-1])
            rows.append([i, cls.composition, cls.majority, cls.growth, f"{float(cls.statute_share):.6f}",
                         "; ".join(cls.diagnostics)])
            members = set(fg.families[i])
            words = []
            for snap, g in zip(ws.series(country), ws.graphs(country)):
                of = cluster_of_leaves(g, sel, clusters[snap.year])
                words += [n.text for n in snap.nodes() if n.text and (snap.year, of.get(n.key)) in members]
            texts[i] = "\n".join(words)
        ws.write_csv(f"families/{country}-classes.csv",
                     ["family", "composition", "majority", "growth", "statute_share", "diagnostics"], rows)
        ranked = family_tfidf(texts, cfg.tfidf_k)
        ws.write_csv(f"families/{country}-tfidf.csv", ["family", "rank", "term", "score"],
                     [[f, i + 1, t, f"{s:.6f}"] for f, terms in sorted(ranked.items())
                      for i, (t, s) in enumerate(terms)])


def stage_stars(ws: Workspace):
    cfg = ws.config
    for country in cfg.countries:
        for g in ws.graphs(country):
            stars = microstars.extract_stars(g, cfg.min_size, cfg.density_cap, cfg.ratio, jobs=cfg.jobs)
            ws.record(microstars.write_csv(stars, ws.path("stars", f"{country}-{g.graph['year']}.csv")))


def stage_profile(ws: Workspace, units=None):
    seen = set()
    for country in ws.config.countries:
        sel = ws.config.selector(country)
        series, graphs = ws.series(country), ws.graphs(country)
        qs = ws.quotients(country)
        chosen = units or (sorted(qs[-1].nodes) if qs else [])
        found = []
        for unit in chosen:
            try:
                prof = profiles.profile(unit, series, graphs, sel)
            except profiles.UnitNotFoundError:
                continue
            seen.add(unit)
            found.append(prof)
            safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in str(unit))
            ws.record(prof.write_csv(ws.path("profiles", country, f"{safe}.csv")))
            last = max(prof.years)
            q = next(q for q in qs if q.graph["year"] == last)
            rel, resp = profiles.ego_views(unit, q)
            ws.write_json(f"profiles/{country}/{safe}-ego.json",
                          {"year": last, "reliance": rel.to_json(), "responsibility": resp.to_json(),
                           "diagnostics": prof.diagnostics})
            ws.write_bytes(f"profiles/{country}/{safe}-reliance.dot", rel.to_dot().encode())
            ws.write_bytes(f"profiles/{country}/{safe}-responsibility.dot", resp.to_dot().encode())
        years = sorted({y for p in found for y in p.years})
        if len(years) >= 2:
            rows = profiles.change_table(found, years[0], years[-1])
            ws.write_csv(f"profiles/{country}-change-{years[0]}-{years[-1]}.csv",
                         ["unit"] + list(profiles.INDICATORS),
                         [[r["unit"]] + ["" if r[i] is None else r[i] for i in profiles.INDICATORS] for r in rows])
    # a requested unit only has to exist in one of the selected countries
    missing = [u for u in units or () if u not in seen]
    if missing:
        raise profiles.UnitNotFoundError(f"unit {missing[0]!r} is not present in any snapshot")


def stage_estimate(ws: Workspace):
    rows = []
    for country in ws.config.countries:
        reg = ws.registry(country)
        for snap in ws.series(country):
            texts = [n.text for n in snap.nodes() if n.text]
            spans = [citeparse.find_references(t, country, reg, snap.year) for t in texts]
            diag = citeparse.Diagnostics()
            share = citeparse.estimate_unextracted(texts, spans, diag)
            rows.append([country, snap.year, sum(map(len, spans)), diag.outside_hits, f"{share:.6f}"])
    ws.write_csv("estimate/extraction.csv", ["country", "year", "extracted", "missed", "share_extracted"], rows)


def evaluate(path_a, path_b) -> dict:
    a, b = Clustering.read_csv(path_a), Clustering.read_csv(path_b)
    diags = []
    return {"nmi": partcmp.nmi(a, b, diags), "ari": partcmp.ari(a, b, diags), "diagnostics": diags}


STAGES = {
    "ingest": stage_ingest,
    "extract-refs": stage_extract,
    "graph": stage_graph,
    "growth": stage_growth,
    "connectivity": stage_connectivity,
    "cluster": stage_cluster,
    "align": stage_align,
    "families": stage_families,
    "stars": stage_stars,
    "profile": stage_profile,
    "estimate-missed": stage_estimate,
}
