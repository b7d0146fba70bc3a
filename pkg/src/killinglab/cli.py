"""Command line scenario runner.

    killinglab run scenario.yaml [--seed N] [--out DIR] [--samples N]
    killinglab --list-experiments

A scenario is a YAML (or JSON) mapping with keys ``experiment``, ``params``,
``seed`` and ``tolerances``.  The run writes ``report.json`` and
``samples.csv`` into the output directory.  Exit codes: 0 all checks pass,
1 some check failed, 2 the scenario could not be parsed or validated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import yaml

from . import __version__
from .experiments import DEFAULT_TOLERANCES, EXPERIMENTS, ParamError

__all__ = ["main", "load_scenario", "run_scenario", "ScenarioError", "format_float"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ScenarioError(ValueError):
    pass


def format_float(v) -> str:
    """Shortest round-trip repr, so tables are byte-stable across runs."""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def load_scenario(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be a mapping")
    unknown = set(doc) - {"experiment", "params", "seed", "tolerances"}
    if unknown:
        raise ScenarioError(f"{path}: unknown keys {sorted(unknown)}")
    name = doc.get("experiment")
    if name not in EXPERIMENTS:
        raise ScenarioError(f"unknown experiment {name!r}; known: {sorted(EXPERIMENTS)}")
    params = doc.get("params") or {}
    tols = doc.get("tolerances") or {}
    if not isinstance(params, dict) or not isinstance(tols, dict):
        raise ScenarioError("params and tolerances must be mappings")
    bad = set(tols) - set(DEFAULT_TOLERANCES)
    if bad:
        raise ScenarioError(f"unknown tolerance keys {sorted(bad)}")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError("seed must be an integer")
    return {"experiment": name, "params": params, "seed": seed, "tolerances": tols}


def run_scenario(scenario: dict, seed: int | None = None, samples: int | None = None):
    """Validate and run; returns (report dict, csv text)."""
    exp = EXPERIMENTS[scenario["experiment"]]
    params = exp.validate(scenario["params"])
    tol = dict(DEFAULT_TOLERANCES)
    tol.update({k: float(v) for k, v in scenario["tolerances"].items()})
    seed = scenario["seed"] if seed is None else seed
    checks, (header, rows), summary = exp.run(params, seed, tol, samples)
    report = {
        "tool": "killinglab",
        "version": __version__,
        "scenario": {**scenario, "seed": seed, "samples_override": samples},
        "tolerances": tol,
        "summary": summary,
        "checks": [c.as_dict() for c in checks],
        "pass": all(c.passed for c in checks),
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(v) for v in r])
    return report, buf.getvalue()


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="killinglab", description="Run verification scenarios.")
    ap.add_argument("--list-experiments", action="store_true", help="list experiment names and exit")
    sub = ap.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("file")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=".")
    run.add_argument("--samples", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.list_experiments:
        for name, e in EXPERIMENTS.items():
            print(f"{name:20s} {e.doc}")
        return EXIT_OK
    if args.command != "run":
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        scenario = load_scenario(args.file)
        report, table = run_scenario(scenario, args.seed, args.samples)
    except (ScenarioError, ParamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    (out / "samples.csv").write_text(table)
    for c in report["checks"]:
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']}: {c['value']} {c['relation']} {c['threshold']}")
    print("overall:", "PASS" if report["pass"] else "FAIL")
    return EXIT_OK if report["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
