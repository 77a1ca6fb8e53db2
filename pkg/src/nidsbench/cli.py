"""Command line entry point: ``nidsbench {run,grid,report,compare}``.

Errors are written to stderr as one JSON object per line and the process
exits with status 2 (1 for a grid in which some cells failed).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench
from .classifiers import KINDS
from .errors import ConfigError, NidsBenchError


def _csv_list(text, cast=str):
    return [cast(part.strip()) for part in text.split(",") if part.strip()]


def _common(p, grid=False):
    p.add_argument("--config", type=Path, help="key = value settings file; flags override it")
    p.add_argument("--train", help="training CSV")
    p.add_argument("--test", help="test CSV")
    many = " (comma-separated list)" if grid else ""
    p.add_argument("--task", help="binary or multiclass" + many)
    p.add_argument("--reducer", help="selection, extraction or none" + many)
    p.add_argument("--k", help="number of reduced features" + many)
    p.add_argument("--classifier", help=f"one of {', '.join(KINDS)}" + many)
    p.add_argument("--seed", type=int)
    p.add_argument("--repeat", type=int, help="timed passes; the median is reported")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="nidsbench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configuration")
    _common(run)
    run.add_argument("--threshold", type=float, help="selection threshold on average correlation")

    grid = sub.add_parser("grid", help="run a grid (default: the full 2 x 2 x 3 x 5 grid)")
    _common(grid, grid=True)

    report = sub.add_parser("report", help="emit tables from stored run reports")
    report.add_argument("--out", required=True, help="directory holding runs/*.jsonl")
    report.add_argument("--format", choices=("csv", "markdown"), default="markdown")

    compare = sub.add_parser("compare", help="summarize selection vs extraction")
    compare.add_argument("--out", required=True, help="directory holding runs/*.jsonl")
    return parser


def _base_values(args):
    values = {}
    if args.config is not None:
        values.update(bench.parse_config_text(args.config.read_text(encoding="utf-8")))
    for key in ("train", "test", "seed", "repeat", "out"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return values


def _cmd_run(args):
    values = _base_values(args)
    for key in ("task", "reducer", "k", "classifier", "threshold"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = bench.config_from_values(values)
    report = bench.run_experiment(cfg)
    print(json.dumps(report.to_dict(), sort_keys=True))
    return 0


def _cmd_grid(args):
    values = _base_values(args)
    tasks = _csv_list(args.task) if args.task else _csv_list(values.get("task", ",".join(bench.TASKS)))
    kinds = _csv_list(args.classifier) if args.classifier else list(KINDS)
    ks = _csv_list(args.k, int) if args.k else list(bench.GRID_K)
    methods = _csv_list(args.reducer) if args.reducer else ["selection", "extraction"]
    reducers = [bench.ReducerConfig("none") if m == "none" else bench.ReducerConfig(m, k=k)
                for m in methods for k in ([None] if m == "none" else ks)]
    values.pop("k", None)
    values.pop("threshold", None)
    values["reducer"] = "none"
    values["task"] = tasks[0]
    values["classifier"] = kinds[0]
    base = bench.config_from_values(values)
    failures = []
    reports = bench.run_grid(base, tasks, reducers, kinds, failures=failures)
    for r in reports:
        print(json.dumps({"task": r.task, "method": r.method, "k": r.k, "classifier": r.classifier,
                          "precision": r.precision, "recall": r.recall, "f1": r.f1}))
    for f in failures:
        print(json.dumps(f), file=sys.stderr)
    return 1 if failures else 0


def _stored_reports(out):
    runs = out / "runs"
    return bench.read_reports([runs]) if runs.is_dir() else []


def _cmd_report(args):
    out = Path(args.out)
    reports = _stored_reports(out)
    tables = bench.emit_tables(reports, args.format, out / "tables")
    for name, text in tables.items():
        print(f"## {name}\n{text}")
    return 0


def _cmd_compare(args):
    out = Path(args.out)
    summary = bench.compare_runs(_stored_reports(out))
    text = json.dumps(summary.to_dict(), indent=2, sort_keys=True)
    (out / "summary.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


COMMANDS = {"run": _cmd_run, "grid": _cmd_grid, "report": _cmd_report, "compare": _cmd_compare}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (NidsBenchError, ConfigError, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        context = getattr(exc, "run_context", None)
        if context:
            record["context"] = context
        print(json.dumps(record), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
