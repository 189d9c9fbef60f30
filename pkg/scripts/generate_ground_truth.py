#!/usr/bin/env python3
"""
Ground Truth Generation Script

Regenerates exact target files for the preset catalog:
- <chain>.stats.json - stationary law, phi(1..n), C(0), Gamma, varsigma
- <suspension>.stats.json - taubar, eta, F, Fbar and the eta covariances
- lil-constants.stats.json - Cameron-Martin suprema with closed forms

Chain targets use the closed-form Gamma, not the truncated sum, so the files
stay independent of the tail cutoff.

Usage:
    python scripts/generate_ground_truth.py --all
    python scripts/generate_ground_truth.py --preset two-state-roof --output ground-truth/
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Dict

import numpy as np

from roughflow.cm_opt.optimizer import ContractionTensor, LilConfig, lil_constant
from roughflow.errors import RoughflowError
from roughflow.mixing_gen.presets import chain_preset, suspension_preset
from roughflow.mixing_gen.statistics import covariance_summary, phi_sequence
from roughflow.mixing_gen.suspension import (
    continuous_limit_covariance,
    eta_covariance_summary,
    eta_values,
    fiber_area,
    fiber_area_mean,
    roof_mean,
)

# Presets with hand-checkable closed forms
CHAIN_TARGETS = {
    "two-state-0.3": {"phi_terms": 10},
    "iid-rademacher": {"phi_terms": 5},
    "asymmetric-two-state": {"phi_terms": 5},
}

SUSPENSION_TARGETS = ["two-state-roof", "unit-roof"]

LIL_CONSTANTS = "lil-constants"


def chain_stats(name: str, phi_terms: int) -> Dict:
    spec = chain_preset(name)
    summary = covariance_summary(spec)
    gamma = summary.gamma_closed
    return {
        "kind": "chain",
        "preset": name,
        "stationary": spec.stationary.tolist(),
        "phi": phi_sequence(spec, phi_terms).tolist(),
        "var0": summary.var0.tolist(),
        "gamma": gamma.tolist(),
        "sigma": (summary.var0 + gamma + gamma.T).tolist(),
        "spectral_radius": summary.spectral_radius,
    }


def suspension_stats(name: str) -> Dict:
    spec = suspension_preset(name)
    eta = eta_covariance_summary(spec)
    return {
        "kind": "suspension",
        "preset": name,
        "taubar": roof_mean(spec),
        "eta": eta_values(spec).tolist(),
        "fiber_area": fiber_area(spec).tolist(),
        "fiber_area_mean": fiber_area_mean(spec).tolist(),
        "eta_var0": eta.var0.tolist(),
        "eta_gamma": eta.gamma_closed.tolist(),
        "eta_sigma": eta.sigma.tolist(),
        "continuous_covariance": continuous_limit_covariance(spec).tolist(),
    }


def lil_stats() -> Dict:
    config = LilConfig(m=32, restarts=16)
    one = np.eye(1)
    return {
        "kind": "lil-constant",
        "preset": LIL_CONSTANTS,
        "level1_identity": lil_constant(ContractionTensor.coordinate([0], 1), one, config).M,
        "level2_scalar": lil_constant(ContractionTensor.coordinate([0, 0], 1), one, config).M,
        "level3_scalar": lil_constant(ContractionTensor.coordinate([0, 0, 0], 1), one, config).M,
    }


def build(name: str) -> Dict:
    if name in CHAIN_TARGETS:
        return chain_stats(name, **CHAIN_TARGETS[name])
    if name in SUSPENSION_TARGETS:
        return suspension_stats(name)
    if name == LIL_CONSTANTS:
        return lil_stats()
    raise ValueError(f"Unknown preset: {name}")


def save(stats: Dict, output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / f"{stats['preset']}.stats.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(stats, f, indent=2)
        f.write("\n")
    return path


def main():
    """Main entry point."""
    names = list(CHAIN_TARGETS) + SUSPENSION_TARGETS + [LIL_CONSTANTS]
    parser = argparse.ArgumentParser(description="Generate exact ground truth for roughflow presets")
    parser.add_argument("--preset", choices=names, help="Generate one preset only")
    parser.add_argument("--all", action="store_true", help="Generate every preset")
    parser.add_argument("--output", default="ground-truth", help="Output directory (default: ground-truth)")
    args = parser.parse_args()

    if not args.all and not args.preset:
        parser.error("Either --preset or --all must be specified")

    output_dir = Path(args.output)
    selected = names if args.all else [args.preset]

    print("=" * 70)
    print("🧮 Ground Truth Generation")
    print("=" * 70)

    failures = 0
    for name in selected:
        try:
            path = save(build(name), output_dir)
            print(f"  ✓ {name:25s} -> {path}")
        except (RoughflowError, ValueError) as e:
            failures += 1
            print(f"  ❌ {name:25s} - {e}")

    print("=" * 70)
    if failures:
        print(f"❌ {failures} PRESET(S) FAILED")
    else:
        print("✅ ALL PRESETS GENERATED")
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
