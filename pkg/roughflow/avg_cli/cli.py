#!/usr/bin/env python3
"""
roughflow experiment runner

Usage:
    roughflow invariance --config configs/invariance.json --seed 7 --replicas 10000 --out runs/inv
    roughflow lil-constant --config configs/lil-constant.json --seed 0 --replicas 2 --out runs/lc

Writes ``report.json`` and ``series.csv`` into ``--out`` and exits 0 only if
every asserted check passes.
"""

import argparse
import sys
from typing import List, Optional

from roughflow import __version__
from roughflow.avg_cli.config import KINDS, load_config
from roughflow.avg_cli.experiments import run_experiment
from roughflow.avg_cli.models import ExperimentReport
from roughflow.avg_cli.output import write_outputs
from roughflow.errors import ConfigError, RoughflowError
from roughflow.log import configure
from roughflow.rng import MAX_SEED


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roughflow",
        description="Run rough-path averaging experiments",
    )
    parser.add_argument("kind", choices=list(KINDS), help="Experiment to run")
    parser.add_argument("--config", help="Experiment config (JSON)")
    parser.add_argument("--seed", type=_seed, default=None, help="Master seed (overrides the config)")
    parser.add_argument("--replicas", type=int, default=None, help="Monte Carlo replicas (overrides the config)")
    parser.add_argument("--out", required=True, help="Output directory")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    parser.add_argument("--log-level", default=None, help="Log level (default: ROUGHFLOW_LOG_LEVEL)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def print_report(report: ExperimentReport):
    """Print check results with the usual status lines."""
    print("\n" + "-" * 70)
    print("📊 Checks:")
    for check in report.checks:
        if check.ok:
            status = "✅"
        else:
            status = "❌"
        control = " (control, expected to fail)" if check.expect_failure else ""
        print(f"  {status} {check.name}{control}: passed={check.passed}")
        if check.detail:
            print(f"      {check.detail}")

    if report.errors:
        print("\n❌ Errors:")
        for error in report.errors:
            print(f"  - {error}")

    warning = report.summary.get("warning")
    if warning:
        print(f"\n⚠️  {warning}")

    print("\n" + "=" * 70)
    if report.passed:
        print("✅ ALL CHECKS PASSED")
    else:
        print("❌ SOME CHECKS FAILED")
    print("=" * 70)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    configure(args.log_level)

    print("=" * 70)
    print(f"🔬 roughflow {args.kind}")
    print("=" * 70)

    try:
        config = load_config(args.config, args.kind, args.seed, args.replicas, args.threads)
        result = run_experiment(args.kind, config)
        paths = write_outputs(result, args.out)
    except ConfigError as exc:
        print(f"❌ Invalid configuration: {exc}")
        for item in exc.fields:
            print(f"  - {item.get('loc')}: {item.get('msg')}")
        return 1
    except RoughflowError as exc:
        print(f"❌ {type(exc).__name__}: {exc}")
        return 1
    except OSError as exc:
        print(f"❌ Cannot write results: {exc}")
        return 1

    print(f"\n📁 Files:\n  ✓ {paths['report']}\n  ✓ {paths['series']}")
    print_report(result.report)
    return 0 if result.report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
