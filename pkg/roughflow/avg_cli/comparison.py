"""Law comparison of Monte Carlo samples against targets and against each other."""

from typing import Dict, List, Optional

import numpy as np
from scipy import stats

from roughflow.rng import STREAM_BOOTSTRAP, generator


def _columns(sample: np.ndarray) -> np.ndarray:
    sample = np.asarray(sample, dtype=float)
    return sample.reshape(sample.shape[0], -1)


def _centered_products(sample: np.ndarray) -> np.ndarray:
    """Per-replica (x - mean) (x) (x - mean), shape (n, d, d)."""
    x = _columns(sample)
    c = x - x.mean(axis=0)
    return c[:, :, None] * c[:, None, :]


def mean_and_se(sample: np.ndarray):
    x = _columns(sample)
    return x.mean(axis=0), x.std(axis=0, ddof=1) / np.sqrt(x.shape[0])


def covariance_and_se(sample: np.ndarray):
    prod = _centered_products(sample)
    n = prod.shape[0]
    return prod.sum(axis=0) / (n - 1), prod.std(axis=0, ddof=1) / np.sqrt(n)


class ComparisonEngine:
    """
    Comparisons with a standard-error tolerance.

    Every ``compare_*`` method returns a dict with ``passed`` and a list of
    ``differences``, one per entry outside ``tolerance`` standard errors.
    """

    def __init__(self, tolerance: float = 4.0, bootstrap: int = 1000, quantile: float = 0.99,
                 seed: int = 0):
        """
        Args:
            tolerance: Allowed deviation in standard errors
            bootstrap: Resamples for the KS threshold
            quantile: Quantile of the bootstrap KS distribution used as threshold
            seed: Master seed of the bootstrap stream
        """
        self.tolerance = tolerance
        self.bootstrap = bootstrap
        self.quantile = quantile
        self.seed = seed

    def _entries(self, name: str, actual: np.ndarray, expected: np.ndarray, se: np.ndarray) -> Dict:
        actual = np.atleast_1d(np.asarray(actual, dtype=float))
        expected = np.broadcast_to(np.asarray(expected, dtype=float), actual.shape)
        se = np.atleast_1d(np.asarray(se, dtype=float))
        differences = []
        for index in np.ndindex(actual.shape):
            diff = abs(actual[index] - expected[index])
            allowed = self.tolerance * se[index]
            if not diff <= allowed:
                differences.append({
                    "key": f"{name}{list(index)}",
                    "expected": float(expected[index]),
                    "actual": float(actual[index]),
                    "difference": float(diff),
                    "allowed_difference": float(allowed),
                })
        return {
            "passed": not differences,
            "actual": actual,
            "expected": expected,
            "se": se,
            "max_z": float(np.max(np.abs(actual - expected) / np.where(se > 0, se, np.inf), initial=0.0)),
            "differences": differences,
        }

    def compare_mean(self, sample: np.ndarray, expected, name: str = "mean") -> Dict:
        mean, se = mean_and_se(sample)
        return self._entries(name, mean, expected, se)

    def compare_covariance(self, sample: np.ndarray, expected, name: str = "cov") -> Dict:
        cov, se = covariance_and_se(sample)
        return self._entries(name, cov, expected, se)

    def compare_means(self, x: np.ndarray, y: np.ndarray, name: str = "mean") -> Dict:
        """Two-sample mean difference, tested against zero."""
        mx, sx = mean_and_se(x)
        my, sy = mean_and_se(y)
        result = self._entries(name, mx - my, 0.0, np.sqrt(sx ** 2 + sy ** 2))
        result["left"], result["right"] = mx, my
        return result

    def compare_covariances(self, x: np.ndarray, y: np.ndarray, name: str = "cov") -> Dict:
        cx, sx = covariance_and_se(x)
        cy, sy = covariance_and_se(y)
        result = self._entries(name, cx - cy, 0.0, np.sqrt(sx ** 2 + sy ** 2))
        result["left"], result["right"] = cx, cy
        return result

    def ks_threshold(self, x: np.ndarray, y: np.ndarray, stream_index: int = 0) -> float:
        """Bootstrap quantile of the KS statistic under the pooled law."""
        pooled = np.concatenate([x, y])
        rng = generator(self.seed, STREAM_BOOTSTRAP, stream_index)
        draws = np.empty(self.bootstrap)
        for b in range(self.bootstrap):
            left = rng.choice(pooled, size=x.shape[0], replace=True)
            right = rng.choice(pooled, size=y.shape[0], replace=True)
            draws[b] = stats.ks_2samp(left, right, method="asymp").statistic
        return float(np.quantile(draws, self.quantile))

    def compare_ks(self, x: np.ndarray, y: np.ndarray, name: str = "ks", stream_offset: int = 0) -> Dict:
        """Per-coordinate two-sample KS statistic against a bootstrap threshold."""
        xs, ys = _columns(x), _columns(y)
        statistics: List[float] = []
        thresholds: List[float] = []
        differences = []
        for i in range(xs.shape[1]):
            stat = float(stats.ks_2samp(xs[:, i], ys[:, i], method="asymp").statistic)
            threshold = self.ks_threshold(xs[:, i], ys[:, i], stream_offset + i)
            statistics.append(stat)
            thresholds.append(threshold)
            if stat > threshold:
                differences.append({"key": f"{name}[{i}]", "actual": stat, "allowed_difference": threshold})
        return {
            "passed": not differences,
            "statistics": statistics,
            "thresholds": thresholds,
            "median": float(np.median(statistics)),
            "differences": differences,
        }


def summarize(result: Dict, keys: Optional[List[str]] = None) -> Dict:
    """The JSON-friendly part of a comparison result."""
    keys = keys or ["passed", "max_z", "differences"]
    return {k: result[k] for k in keys if k in result}
