"""
Exact dependence statistics of Markov mixing sources.

For a stationary chain the phi-mixing coefficient collapses to the worst
total-variation distance of an n-step row from the stationary law, and the
lagged covariances are finite matrix expressions. Everything here is exact
up to the reported geometric tail.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from roughflow import settings
from roughflow.errors import (
    ClosedFormMismatchError,
    InvalidParameterError,
    NonCenteredObservableError,
    NonSummableMixingError,
)
from roughflow.log import get_logger
from roughflow.mixing_gen.spec import MarkovMixingSpec

logger = get_logger(__name__)

MAX_LAGS = 1_000_000
SUMMABLE_MARGIN = 1e-12
CLOSED_FORM_SLACK = 1e-9


def total_variation(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Half the l1 distance along the last axis."""
    return 0.5 * np.sum(np.abs(np.asarray(u) - np.asarray(v)), axis=-1)


def spectral_gap(P: np.ndarray) -> float:
    """One minus the second largest eigenvalue modulus."""
    moduli = np.sort(np.abs(np.linalg.eigvals(np.asarray(P, dtype=float))))[::-1]
    return float(1.0 - moduli[1]) if moduli.shape[0] > 1 else 1.0


def centered_kernel(spec: MarkovMixingSpec) -> np.ndarray:
    """Q = P - 1 pi; powers of Q carry all decaying correlations."""
    return spec.transition - np.outer(np.ones(spec.states), spec.stationary)


def phi_coefficient(spec: MarkovMixingSpec, n: int) -> float:
    """phi(n) = max over states i with pi_i > 0 of TV(P^n(i, .), pi)."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"phi is defined for integer n >= 1, got {n}")
    Pn = np.linalg.matrix_power(spec.transition, int(n))
    support = spec.stationary > 0
    return float(np.max(total_variation(Pn[support], spec.stationary)))


def phi_sequence(spec: MarkovMixingSpec, n_max: int) -> np.ndarray:
    """phi(1..n_max) by repeated multiplication."""
    support = spec.stationary > 0
    out = np.zeros(n_max)
    Pn = np.eye(spec.states)
    for k in range(n_max):
        Pn = Pn @ spec.transition
        out[k] = np.max(total_variation(Pn[support], spec.stationary))
    # TV to stationarity is nonincreasing; remove rounding wiggle.
    return np.minimum.accumulate(np.clip(out, 0.0, 1.0))


@dataclass(frozen=True)
class MixingDiagnostics:
    """
    phi and rho coefficients up to n_max with the condition value.

    ``condition_value`` is max_{n <= n_max} n^3 (phi(n) + rho(n)). The
    condition is flagged violated when that maximum sits at n_max with a
    nonzero value, i.e. the weighted sequence is still growing.
    """

    phi: np.ndarray
    rho: np.ndarray
    rho0: float
    condition_value: float
    argmax: int
    violated: bool


def mixing_condition_check(spec: MarkovMixingSpec, n_max: int = 50) -> MixingDiagnostics:
    """Evaluate the n^3 (phi + rho) summability condition up to ``n_max``."""
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be >= 1, got {n_max}")
    phi = phi_sequence(spec, n_max)
    # xi(n) is measurable w.r.t. the single-time sigma-algebra, so rho(n) = 0 for n >= 1.
    rho = np.zeros(n_max)
    ns = np.arange(1, n_max + 1, dtype=float)
    weighted = ns ** 3 * (phi + rho)
    k = int(np.argmax(weighted))
    value = float(weighted[k])
    violated = bool(k == n_max - 1 and value > 0.0 and n_max > 1)
    if violated:
        logger.warning("mixing condition fails for %s: n^3 phi(n) still growing at n=%d",
                       spec.label, n_max)
    return MixingDiagnostics(
        phi=phi,
        rho=rho,
        rho0=float(2.0 * np.max(np.abs(spec.observable))),
        condition_value=value,
        argmax=k + 1,
        violated=violated,
    )


def lagged_covariance(spec: MarkovMixingSpec, r: int) -> np.ndarray:
    """C(r)_{ij} = E xi_i(0) xi_j(r) = sum_s pi_s g_i(s) (P^r g_j)(s)."""
    if int(r) != r or r < 0:
        raise InvalidParameterError(f"lag must be a nonnegative integer, got {r}")
    g = spec.observable
    weighted = g.T * spec.stationary
    return weighted @ np.linalg.matrix_power(spec.transition, int(r)) @ g


@dataclass(frozen=True)
class CovarianceSummary:
    """
    Long-run covariance data of a centered stationary sequence.

    Attributes:
        sigma: varsigma = var0 + gamma + gamma^T
        gamma: sum_{r >= 1} C(r), equal to the one-sided sum hat-varsigma
        var0: C(0) = E xi(0) (x) xi(0)
        lag_cutoff: Last lag summed
        tail_bound: Bound on the neglected tail of gamma
        spectral_radius: Spectral radius of P - 1 pi
        gamma_closed: g^T diag(pi) Q (I - Q)^{-1} g, independent of the cutoff
    """

    sigma: np.ndarray
    gamma: np.ndarray
    var0: np.ndarray
    lag_cutoff: int
    tail_bound: float
    spectral_radius: float
    gamma_closed: np.ndarray

    @property
    def sigma_hat(self) -> np.ndarray:
        """One-sided sum over positive lags; identical to ``gamma``."""
        return self.gamma


def closed_form_gamma(spec: MarkovMixingSpec) -> np.ndarray:
    """Gamma = g^T diag(pi) Q (I - Q)^{-1} g; requires spectral radius of Q below one."""
    Q = centered_kernel(spec)
    g = spec.observable
    return (g.T * spec.stationary) @ Q @ np.linalg.solve(np.eye(spec.states) - Q, g)


def covariance_summary(spec: MarkovMixingSpec, tail_tol: Optional[float] = None) -> CovarianceSummary:
    """
    Exact lagged-covariance sums of the chain's observable.

    After lag r the neglected tail is W Q^r h with W = g^T diag(pi) and
    h = Q (I - Q)^{-1} g, so lags are summed until ||W|| ||Q^r||_2 ||h||
    drops below ``tail_tol``. The truncated sum must then agree with the
    closed form to within that bound.

    Raises:
        NonCenteredObservableError: E_pi g != 0 and auto-centering is off
        NonSummableMixingError: rho >= 1 (periodic or reducible chain)
        ClosedFormMismatchError: truncated and closed-form Gamma disagree
    """
    tol = settings.TOLERANCE if tail_tol is None else float(tail_tol)
    if not spec.is_centered:
        raise NonCenteredObservableError(
            f"{spec.label}: E_pi g = {(spec.stationary @ spec.observable).tolist()}; "
            "center the observable or set auto_center=true"
        )
    Q = centered_kernel(spec)
    radius = float(np.max(np.abs(np.linalg.eigvals(Q)))) if spec.states > 1 else 0.0
    if radius >= 1.0 - SUMMABLE_MARGIN:
        raise NonSummableMixingError(
            f"{spec.label}: lagged covariances are not summable (spectral radius of P - 1 pi is {radius:.6g})",
            spectral_radius=radius,
        )

    g = spec.observable
    weighted = g.T * spec.stationary
    var0 = weighted @ g
    h = np.linalg.solve(np.eye(spec.states) - Q, Q @ g)
    scale = float(np.linalg.norm(weighted, 2) * np.linalg.norm(h, 2))
    gamma = np.zeros_like(var0)
    Qg = g.copy()
    Qr = np.eye(spec.states)
    tail = scale
    lag = 0
    for lag in range(1, MAX_LAGS + 1):
        Qg = Q @ Qg
        Qr = Q @ Qr
        gamma = gamma + weighted @ Qg
        tail = scale * float(np.linalg.norm(Qr, 2))
        if tail < tol:
            break
    else:
        raise NonSummableMixingError(
            f"{spec.label}: tail bound {tail:.3g} not below {tol:.3g} after {MAX_LAGS} lags",
            spectral_radius=radius,
        )

    gamma_closed = closed_form_gamma(spec)
    gap = float(np.max(np.abs(gamma - gamma_closed)))
    if gap > tail + CLOSED_FORM_SLACK * max(1.0, float(np.max(np.abs(gamma_closed)))):
        raise ClosedFormMismatchError(
            f"{spec.label}: truncated and closed-form Gamma differ by {gap:.3g} (tail bound {tail:.3g})",
            gap=gap,
        )
    sigma = var0 + gamma + gamma.T
    sigma = 0.5 * (sigma + sigma.T)
    eigen = np.linalg.eigvalsh(sigma)
    if eigen.min() < -max(tol, 1e-10) * max(1.0, abs(eigen).max()):
        logger.warning("%s: long-run covariance has negative eigenvalue %.3g", spec.label, eigen.min())
    logger.debug("%s: Gamma summed to lag %d, tail bound %.3g", spec.label, lag, tail)
    return CovarianceSummary(
        sigma=sigma,
        gamma=gamma,
        var0=var0,
        lag_cutoff=lag,
        tail_bound=tail,
        spectral_radius=radius,
        gamma_closed=gamma_closed,
    )
