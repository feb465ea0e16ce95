"""Command line entry point: ``legalnet <subcommand> [options]``."""
import argparse
import json
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import pipeline
from .pipeline import ENV_INPUT_ROOT, RunConfig, Workspace

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

log = logging.getLogger("legalnet")

CORPUS_COMMANDS = tuple(pipeline.STAGES)
SEEDED_COMMANDS = ("cluster", "families", "pipeline")
PIPELINE_ORDER = ("ingest", "extract-refs", "graph", "growth", "connectivity", "cluster", "align",
                  "families", "stars", "profile", "estimate-missed")


def _years(text):
    lo, _, hi = text.partition("-")
    try:
        return (int(lo), int(hi or lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YEAR or FIRST-LAST, got {text!r}") from None


def _common(p):
    p.add_argument("--input-root", help=f"corpus root (default: ${ENV_INPUT_ROOT} or the bundled corpus)")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--config", help="TOML or JSON file; its values override flags")
    p.add_argument("--country", action="append", choices=("US", "DE"), dest="countries")
    p.add_argument("--years", type=_years)
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def _clustering(p):
    p.add_argument("--runs", type=int)
    p.add_argument("--agreement", type=float)
    p.add_argument("--prefer", type=int)
    p.add_argument("--slack", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="legalnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in CORPUS_COMMANDS + ("pipeline",):
        p = sub.add_parser(name)
        _common(p)
        if name in ("cluster", "families", "pipeline"):
            _clustering(p)
        if name in ("families", "pipeline"):
            p.add_argument("--threshold", type=float, help="family edge threshold p")
            p.add_argument("--rescale", action="store_true", default=None,
                           help="weight statute and regulation tokens equally")
        if name in ("stars", "pipeline"):
            p.add_argument("--min-size", type=int, dest="min_size")
            p.add_argument("--ratio", type=int)
            p.add_argument("--density-cap", type=float, dest="density_cap")
        if name in ("graph", "pipeline"):
            p.add_argument("--compress", action="store_true", default=None)
        if name in ("growth", "pipeline"):
            p.add_argument("--baseline", type=int)
        if name == "profile":
            p.add_argument("--unit", action="append", dest="units", help="unit key (repeatable)")
    ev = sub.add_parser("eval", help="compare two clustering CSVs")
    ev.add_argument("metric", choices=("nmi", "ari", "both"))
    ev.add_argument("a")
    ev.add_argument("b")
    sy = sub.add_parser("synth", help="write the synthetic corpus")
    sy.add_argument("--out", required=True)
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--first-year", type=int, default=2000)
    sy.add_argument("--years", type=int, default=4)
    return parser


def load_config_file(path) -> dict:
    path = Path(path)
    data = path.read_bytes()
    if path.suffix.lower() == ".json":
        return json.loads(data)
    return tomllib.loads(data.decode("utf-8"))


def make_config(args) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in known and v is not None}
    if getattr(args, "config", None):
        extra = load_config_file(args.config)
        unknown = set(extra) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(extra)
    if "countries" in values:
        values["countries"] = tuple(values["countries"])
    if args.command in SEEDED_COMMANDS and "seed" not in values:
        raise ValueError(f"{args.command} needs --seed (or 'seed' in the config file)")
    if values.get("years") is not None:
        values["years"] = tuple(values["years"])
    return RunConfig(**values).validate()


def input_root(args) -> Path:
    root = args.input_root or os.environ.get(ENV_INPUT_ROOT) or pipeline.bundled_corpus()
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"input root {root} does not exist")
    return root


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "eval":
        result = pipeline.evaluate(args.a, args.b)
        if args.metric != "both":
            result = {args.metric: result[args.metric], "diagnostics": result["diagnostics"]}
        print(json.dumps(result, sort_keys=True))
        return 0
    if args.command == "synth":
        from .synth import generate
        generate(args.out, seed=args.seed, first_year=args.first_year, years=args.years)
        return 0
    config = make_config(args)
    ws = Workspace(input_root(args), args.out, config)
    if args.command == "pipeline":
        for stage in PIPELINE_ORDER:
            log.info("stage %s", stage)
            pipeline.STAGES[stage](ws)
        ws.write_manifest("pipeline")
    else:
        stage = pipeline.STAGES[args.command]
        if args.command == "profile":
            stage(ws, args.units)
        else:
            stage(ws)
        ws.write_manifest(args.command, f"manifest-{args.command}.json")
    return 0


def main(argv=None):
    try:
        code = run(argv)
    except (ValueError, LookupError, OSError) as exc:
        print(f"legalnet: error: {exc}", file=sys.stderr)
        code = 2
    sys.exit(code)


if __name__ == "__main__":
    main()
