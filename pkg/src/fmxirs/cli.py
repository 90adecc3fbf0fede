"""Command-line front end: fmx <experiment> [--config ...] [--seed ...] ..."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError
from .experiments import EXPERIMENTS, load_config, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmx",
        description="Run a frequency-mixing-surface experiment and write CSV results.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="INI config file (defaults apply when omitted)")
        p.add_argument("--seed", type=int, help="master random seed")
        p.add_argument("--trials", type=int, help="Monte-Carlo trial count")
        p.add_argument("--out", help="output directory (default: results)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.experiment, path=args.config, seed=args.seed,
                          trials=args.trials, out=args.out)
        written = run(cfg)
    except ConfigurationError as exc:
        print(f"fmx: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fmx: i/o error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"fmx: error: {exc}", file=sys.stderr)
        return 1

    for path in written:
        print(path)

    if args.experiment == "validate":
        failures = _validate_failures(written[0])
        if failures:
            print(f"fmx: {len(failures)} validation check(s) failed: {', '.join(failures)}",
                  file=sys.stderr)
            return 1
    return 0


def _validate_failures(csv_path) -> list[str]:
    import csv as _csv

    with open(csv_path, newline="", encoding="utf-8") as fh:
        return [row["check"] for row in _csv.DictReader(fh) if row["status"] != "pass"]


if __name__ == "__main__":
    raise SystemExit(main())
