"""Command-line entry point.

Exit codes: 0 ok, 1 configuration error, 2 numerical failure, 3 selftest
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..sim.estimate import default_workers
from ..sim.hyperplane import RejectionStallError, WindowTooSmallError
from . import commands
from .config import ConfigError, load
from .selftest import run_selftest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SELFTEST = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zerocell", description="Zero-cell norm laws, bounds and simulations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config, help_ in (
        ("law", True, "exact Voronoi law or hyperplane bounds"),
        ("simulate", True, "Monte Carlo tail estimates with Wilson intervals"),
        ("threshold-sweep", True, "finite-n rates across dimensions, CSV and SVG"),
        ("rates", False, "limiting rates and threshold radii"),
        ("selftest", False, "run the invariant suite"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=needs_config, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: $ZEROCELL_WORKERS or 1)")
    return parser


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    # newline="" keeps the CRLF row terminators of the CSV writer
    with open(out / name, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {out / name}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        workers = default_workers() if args.workers is None else args.workers
        if workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = load(args.config).with_seed(args.seed) if args.config else None

        if args.command == "selftest":
            return EXIT_OK if run_selftest() else EXIT_SELFTEST
        if args.command == "law":
            _write(out, "law.csv", commands.cmd_law(cfg))
        elif args.command == "simulate":
            text, manifest = commands.cmd_simulate(cfg, workers)
            _write(out, "simulate.csv", text)
            _write(out, "simulate_manifest.json", commands.manifest_json(manifest))
        elif args.command == "threshold-sweep":
            text, svgs = commands.cmd_threshold_sweep(cfg)
            _write(out, "threshold_sweep.csv", text)
            for name, svg in svgs.items():
                _write(out, name, svg)
        elif args.command == "rates":
            _write(out, "rates.csv", commands.cmd_rates(cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WindowTooSmallError as exc:
        print(f"numerical failure: {exc} (measured rate {exc.rate:.4f})", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, RejectionStallError, ValueError, RuntimeError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
