#!/usr/bin/env python3
"""
Ground Truth Validation Script

Validates ground truth files for format correctness and completeness, and
optionally checks produced ``report.json`` files for consistency.

Usage:
    # Validate all files
    python scripts/validate_ground_truth.py

    # Validate specific preset
    python scripts/validate_ground_truth.py --preset two-state-roof

    # Also validate experiment reports
    python scripts/validate_ground_truth.py --report runs/inv/report.json --verbose
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

# Required fields for each file kind
REQUIRED_FIELDS = {
    "chain": {"preset", "stationary", "phi", "var0", "gamma", "sigma", "spectral_radius"},
    "suspension": {"preset", "taubar", "eta", "fiber_area", "fiber_area_mean",
                   "eta_var0", "eta_gamma", "eta_sigma", "continuous_covariance"},
    "lil-constant": {"preset", "level1_identity", "level2_scalar", "level3_scalar"},
}

REQUIRED_REPORT_FIELDS = {
    "kind", "config", "version", "seed", "streams", "targets", "summary", "checks", "errors", "passed"
}

REQUIRED_CHECK_FIELDS = {"name", "expected", "actual", "passed", "expect_failure"}

SYMMETRY_TOL = 1e-12


class GroundTruthValidator:
    """Validates ground truth files for correctness."""

    def __init__(self, ground_truth_dir: Path, verbose: bool = False):
        self.ground_truth_dir = Path(ground_truth_dir)
        self.verbose = verbose
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def presets(self) -> List[str]:
        return sorted(p.name[: -len(".stats.json")] for p in self.ground_truth_dir.glob("*.stats.json"))

    def validate_preset(self, name: str) -> Tuple[bool, Dict]:
        """
        Validate one ``<name>.stats.json`` file.

        Returns:
            Tuple of (success: bool, results: Dict)
        """
        results = {"preset": name, "errors": [], "warnings": []}
        path = self.ground_truth_dir / f"{name}.stats.json"
        if not path.exists():
            results["errors"].append(f"Missing file: {path.name}")
            return False, results

        try:
            with open(path, "r", encoding="utf-8") as f:
                stats = json.load(f)
        except json.JSONDecodeError as e:
            results["errors"].append(f"{path.name} - JSON parse error: {e}")
            return False, results

        kind = stats.get("kind")
        required = REQUIRED_FIELDS.get(kind)
        if required is None:
            results["errors"].append(f"{path.name} - Unknown kind: {kind!r}")
            return False, results

        missing = required - set(stats)
        if missing:
            results["errors"].append(f"{path.name} - Missing fields: {sorted(missing)}")
            return False, results

        if stats["preset"] != name:
            results["warnings"].append(f"{path.name} - preset field says {stats['preset']!r}")

        if kind == "chain":
            self._check_chain(stats, results)
        elif kind == "suspension":
            self._check_suspension(stats, results)

        if self.verbose:
            print(f"  ✓ {path.name}: {len(stats)} fields")

        return not results["errors"], results

    def _check_chain(self, stats: Dict, results: Dict):
        pi = np.asarray(stats["stationary"], dtype=float)
        if abs(pi.sum() - 1.0) > SYMMETRY_TOL:
            results["errors"].append(f"stationary law sums to {pi.sum()}")
        phi = np.asarray(stats["phi"], dtype=float)
        if np.any(np.diff(phi) > SYMMETRY_TOL) or np.any(phi < 0) or np.any(phi > 1):
            results["errors"].append("phi must be nonincreasing in [0, 1]")
        var0 = np.asarray(stats["var0"], dtype=float)
        gamma = np.asarray(stats["gamma"], dtype=float)
        sigma = np.asarray(stats["sigma"], dtype=float)
        if not np.allclose(sigma, var0 + gamma + gamma.T, atol=SYMMETRY_TOL):
            results["errors"].append("sigma differs from var0 + gamma + gamma^T")
        if not np.allclose(sigma, sigma.T, atol=SYMMETRY_TOL):
            results["errors"].append("sigma is not symmetric")

    def _check_suspension(self, stats: Dict, results: Dict):
        area = np.asarray(stats["fiber_area"], dtype=float)
        eta = np.asarray(stats["eta"], dtype=float)
        # symmetric part of every F equals eta (x) eta / 2
        sym = 0.5 * (area + np.swapaxes(area, -1, -2))
        if not np.allclose(sym, 0.5 * eta[:, :, None] * eta[:, None, :], atol=SYMMETRY_TOL):
            results["errors"].append("Sym F differs from eta (x) eta / 2")
        if stats["taubar"] <= 0:
            results["errors"].append(f"taubar must be positive, got {stats['taubar']}")
        sigma = np.asarray(stats["eta_sigma"], dtype=float)
        continuous = np.asarray(stats["continuous_covariance"], dtype=float)
        if not np.allclose(continuous * stats["taubar"], sigma, atol=SYMMETRY_TOL):
            results["errors"].append("continuous covariance differs from eta_sigma / taubar")

    def validate_report(self, path: Path) -> Tuple[bool, Dict]:
        """Check a ``report.json`` for required fields and a consistent pass flag."""
        results = {"report": str(path), "errors": [], "warnings": []}
        try:
            with open(path, "r", encoding="utf-8") as f:
                report = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            results["errors"].append(f"{path} - Error reading file: {e}")
            return False, results

        missing = REQUIRED_REPORT_FIELDS - set(report)
        if missing:
            results["errors"].append(f"{path} - Missing fields: {sorted(missing)}")
            return False, results

        ok = True
        for i, check in enumerate(report["checks"]):
            missing = REQUIRED_CHECK_FIELDS - set(check)
            if missing:
                results["errors"].append(f"check {i} - Missing fields: {sorted(missing)}")
                continue
            ok = ok and check["passed"] != check["expect_failure"]
        expected = ok and not report["errors"]
        if report["passed"] != expected:
            results["errors"].append(f"passed flag is {report['passed']}, checks say {expected}")
        if not report["passed"]:
            results["warnings"].append("report records failed checks")

        return not results["errors"], results

    def validate_all(self, presets: Optional[List[str]] = None) -> Dict:
        """
        Validate all ground truth files.

        Returns:
            Dict with validation results for all presets
        """
        names = presets or self.presets()
        results = {"total": len(names), "presets": {}, "summary": {"valid": 0, "invalid": 0}}
        for name in names:
            valid, preset_results = self.validate_preset(name)
            results["presets"][name] = preset_results
            results["summary"]["valid" if valid else "invalid"] += 1
        return results


def print_results(results: Dict, verbose: bool = False):
    """Print validation results for every preset."""
    print(f"\nValidating {results['total']} presets...")
    print()
    for name, preset_results in results["presets"].items():
        status = "✅" if not preset_results["errors"] else "❌"
        print(f"{status} {name}")
        for error in preset_results["errors"]:
            print(f"    - {error}")
        if verbose:
            for warning in preset_results["warnings"]:
                print(f"    ⚠️  {warning}")

    print("\n" + "=" * 70)
    print("📊 SUMMARY")
    print("=" * 70)
    print(f"  ✅ Valid:   {results['summary']['valid']}")
    print(f"  ❌ Invalid: {results['summary']['invalid']}")
    print("=" * 70)


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description="Validate roughflow ground truth and reports")
    parser.add_argument("--preset", help="Validate specific preset only")
    parser.add_argument("--ground-truth-dir", default="ground-truth",
                        help="Ground truth directory (default: ground-truth)")
    parser.add_argument("--report", action="append", default=[], help="report.json to validate (repeatable)")
    parser.add_argument("--verbose", action="store_true", help="Verbose output")
    parser.add_argument("--json", action="store_true", help="Output results as JSON")
    args = parser.parse_args()

    ground_truth_dir = Path(args.ground_truth_dir)
    if not ground_truth_dir.exists():
        print(f"❌ Ground truth directory not found: {ground_truth_dir}")
        sys.exit(1)

    validator = GroundTruthValidator(ground_truth_dir, verbose=args.verbose)

    print("=" * 70)
    print("🔍 Ground Truth Validation")
    print("=" * 70)

    results = validator.validate_all([args.preset] if args.preset else None)
    all_valid = results["summary"]["invalid"] == 0

    for report in args.report:
        valid, report_results = validator.validate_report(Path(report))
        results.setdefault("reports", {})[report] = report_results
        all_valid = all_valid and valid

    if args.json:
        print(json.dumps(results, indent=2))
    else:
        print_results(results, verbose=args.verbose)
        for report, report_results in results.get("reports", {}).items():
            status = "✅" if not report_results["errors"] else "❌"
            print(f"{status} {report}")
            for error in report_results["errors"]:
                print(f"    - {error}")

    if all_valid:
        print("✅ ALL FILES VALIDATED SUCCESSFULLY")
    else:
        print("❌ SOME FILES FAILED VALIDATION")
    sys.exit(0 if all_valid else 1)


if __name__ == "__main__":
    main()
