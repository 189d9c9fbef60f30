"""Parameters (Sigma, Gamma) of Brownian rough paths."""

from dataclasses import dataclass, field

import numpy as np

from roughflow.errors import DimensionMismatchError, InvalidParameterError
from roughflow.mixing_gen.statistics import CovarianceSummary

PSD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BrownianRoughPathParams:
    """
    Covariance Sigma of the first level and drift Gamma of the second.

    The second level over [s, t] is the Ito iterated integral plus
    Gamma (t - s). Gamma = Sigma / 2 is the Stratonovich lift, Gamma = 0 the
    Ito lift. Eigenvalues of Sigma down to -1e-12 are clipped to zero.
    """

    sigma: np.ndarray
    gamma: np.ndarray = None
    root: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        d = sigma.shape[0]
        if sigma.shape != (d, d):
            raise DimensionMismatchError(f"Sigma must be square, got shape {sigma.shape}")
        if not np.allclose(sigma, sigma.T, rtol=0.0, atol=PSD_TOL * max(1.0, np.abs(sigma).max())):
            raise InvalidParameterError("Sigma must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        values, vectors = np.linalg.eigh(sigma)
        if values.min() < -PSD_TOL * max(1.0, np.abs(values).max()):
            raise InvalidParameterError(f"Sigma is not positive semidefinite (eigenvalue {values.min():.3g})")
        values = np.clip(values, 0.0, None)
        root = (vectors * np.sqrt(values)) @ vectors.T
        gamma = np.zeros((d, d)) if self.gamma is None else np.atleast_2d(np.asarray(self.gamma, dtype=float))
        if gamma.shape != (d, d):
            raise DimensionMismatchError(f"Gamma must have shape {(d, d)}, got {gamma.shape}")
        for name, value in (("sigma", sigma), ("gamma", gamma), ("root", root)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    def scaled(self, factor: float) -> "BrownianRoughPathParams":
        """Sigma and Gamma both multiplied by ``factor``."""
        return BrownianRoughPathParams(factor * self.sigma, factor * self.gamma)


def ito(sigma) -> BrownianRoughPathParams:
    return BrownianRoughPathParams(sigma, None)


def stratonovich(sigma) -> BrownianRoughPathParams:
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    return BrownianRoughPathParams(sigma, 0.5 * sigma)


def limiting_parameters(summary: CovarianceSummary) -> BrownianRoughPathParams:
    """Invariance-principle limit of the lifted sums: (Sigma, Gamma) = (varsigma, Gamma)."""
    return BrownianRoughPathParams(summary.sigma, summary.gamma)
