"""
Pytest Configuration and Fixtures for roughflow

Provides shared fixtures for:
- Ground truth loading and comparison
- Seeded random generators
- Preset chains, suspensions and field families
- Temporary config files for CLI runs
"""

import json
import os
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pytest

from roughflow.mixing_gen.presets import chain_preset, suspension_preset
from roughflow.rde.fields import sine_scalar
from tests.utils.comparison import ComparisonEngine


# Test configuration
FIXTURE_SEED = int(os.getenv("FIXTURE_SEED", "42"))
GROUND_TRUTH_DIR = Path(__file__).parent.parent / "ground-truth"
CONFIGS_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def ground_truth_loader():
    """
    Loads ground truth data for comparison.

    Usage:
        stats = ground_truth_loader("two-state-0.3", "stats")
    """
    def load(preset: str, data_type: str = "stats") -> Optional[Dict]:
        """
        Load ground truth data from file.

        Args:
            preset: Preset name (e.g., "two-state-roof")
            data_type: Type of data (only "stats" exists)

        Returns:
            Dict: Loaded data, or None if file not found
        """
        file_path = GROUND_TRUTH_DIR / f"{preset}.{data_type}.json"

        if not file_path.exists():
            print(f"⚠️  Ground truth file not found: {file_path}")
            return None

        with open(file_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    return load


@pytest.fixture
def compare_with_ground_truth(ground_truth_loader):
    """
    Compares computed statistics with ground truth data.

    Usage:
        result = compare_with_ground_truth(
            actual_stats,
            preset="two-state-0.3",
            tolerance=1e-12,
            keys=["gamma", "sigma"],
        )
    """
    def compare(
        actual: Dict,
        preset: str,
        tolerance: float = 1e-12,
        strict: bool = True,
        keys=None,
    ) -> Dict:
        """
        Compare actual results with ground truth.

        Args:
            actual: Computed statistics
            preset: Preset name
            tolerance: Allowed difference relative to max(1, |expected|)
            strict: If True, mismatches give status "fail", else "warning"
            keys: Restrict the comparison to these keys

        Returns:
            Dict with comparison results
        """
        expected = ground_truth_loader(preset, "stats")

        if expected is None:
            return {
                "status": "no_ground_truth",
                "message": f"Ground truth not found for {preset}.stats"
            }

        comparison = ComparisonEngine(tolerance).compare_stats(actual, expected, keys)
        comparison["status"] = "pass"
        if comparison["differences"]:
            comparison["status"] = "fail" if strict else "warning"

        return comparison

    return compare


@pytest.fixture
def rng_factory():
    """
    Factory fixture for seeded numpy generators.

    Usage:
        rng = rng_factory()       # FIXTURE_SEED
        rng = rng_factory(7)      # FIXTURE_SEED + 7
    """
    def make(offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(FIXTURE_SEED + offset)

    return make


@pytest.fixture
def two_state_chain():
    """Symmetric two-state chain, alpha = beta = 0.3, g = (+1, -1)."""
    return chain_preset("two-state-0.3")


@pytest.fixture
def asymmetric_chain():
    return chain_preset("asymmetric-two-state")


@pytest.fixture
def rademacher_chain():
    return chain_preset("iid-rademacher")


@pytest.fixture
def two_state_roof():
    """Asymmetric base, roofs (0.5, 1.5), constant fibers."""
    return suspension_preset("two-state-roof")


@pytest.fixture
def sine_field():
    """sigma(x) = 1 + 0.5 sin x, b = 0."""
    return sine_scalar()


@pytest.fixture
def write_config(tmp_path):
    """
    Factory fixture writing a JSON config into tmp_path.

    Usage:
        path = write_config({"kind": "lil-constant", "indices": [0]})
    """
    def write(data: Dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return path

    return write


# Session-wide setup
@pytest.fixture(scope="session", autouse=True)
def test_environment():
    """
    Prints the test environment before running tests.
    """
    print("\n" + "="*70)
    print("🧪 roughflow - Testing Environment")
    print("="*70)
    print(f"Fixture Seed: {FIXTURE_SEED}")
    print(f"Ground Truth Dir: {GROUND_TRUTH_DIR}")
    print(f"Configs Dir: {CONFIGS_DIR}")
    print("="*70 + "\n")

    yield

    print("\n" + "="*70)
    print("✅ Test session completed")
    print("="*70 + "\n")
