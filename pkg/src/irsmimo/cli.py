"""Command-line front ends: `simulate` runs a sweep from a JSON config,
`report` pretty-prints a summary.json."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .experiments import load_config, parse_methods, run_sweep


def main_simulate(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run a Monte-Carlo sweep described by a JSON config file.")
    parser.add_argument("--config", required=True, help="path to the JSON experiment config")
    parser.add_argument("--trials", type=int, help="override the trial count")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--threads", type=int, default=1, help="worker processes (default: 1)")
    parser.add_argument("--methods", help="comma-separated subset of methods to run")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.trials is not None:
            config = replace(config, trials=args.trials)
        if args.seed is not None:
            config = replace(config, master_seed=args.seed)
        if args.methods is not None:
            config = replace(config, methods=parse_methods(args.methods))
        result = run_sweep(config, args.out, threads=args.threads)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.json_path}")
    return 0


def main_report(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="report",
        description="Print the aggregate table from a sweep output directory.")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding summary.json")
    args = parser.parse_args(argv)

    path = Path(args.in_dir) / "summary.json"
    try:
        with open(path) as fh:
            summary = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return 1

    print(f"sweep axis: {summary.get('sweep_axis', '?')}    "
          f"version: {summary.get('version', '?')}")
    header = f"{'value':>22}  {'method':<34}{'mean':>12}{'stderr':>12}{'trials':>8}"
    print(header)
    print("-" * len(header))
    for entry in summary.get("summary", []):
        value = entry.get("sweep_value")
        if isinstance(value, dict):
            value = "x".join(str(value[k]) for k in ("n_r", "n_t", "m") if k in value)
        value = "perfect" if value is None else str(value)
        mean = entry.get("mean")
        stderr = entry.get("stderr")
        mean_s = "-" if mean is None else f"{mean:.4f}"
        stderr_s = "-" if stderr is None else f"{stderr:.4f}"
        print(f"{value:>22}  {entry.get('method', '?'):<34}"
              f"{mean_s:>12}{stderr_s:>12}{entry.get('trials', 0):>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main_simulate())
