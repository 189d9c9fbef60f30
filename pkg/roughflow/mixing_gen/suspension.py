"""
Suspension flows over Markov bases.

The flow spends time tau(state_k) on fiber k and there follows a fiber
observable that is polynomial in the fiber height. Integrals over whole and
partial fibers are evaluated from antiderivative polynomials, so the rough
path of

    V(t) = eps * int_0^{t taubar / eps^2} xi(s) ds,
    VV_ij(t) = eps^2 * int_0^{t taubar / eps^2} xi_j(s) int_0^s xi_i(u) du ds

is exact on its grid of fiber boundaries.

The fiber observable is centered by shifting every constant coefficient by
E_pi eta / taubar, which gives E eta = 0 for eta = int_0^tau xi.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as poly

from roughflow.errors import InvalidParameterError
from roughflow.mixing_gen.sampling import sample_states
from roughflow.mixing_gen.spec import MarkovMixingSpec, SuspensionSpec
from roughflow.mixing_gen.statistics import CovarianceSummary, covariance_summary
from roughflow.tensor_core.path import CadlagRoughPath


def roof_mean(spec: SuspensionSpec) -> float:
    """taubar = E_pi tau."""
    return float(spec.base.stationary @ spec.roof)


def _raw_eta(spec: SuspensionSpec) -> np.ndarray:
    coef = spec.raw_coefficients
    S, d, _ = coef.shape
    out = np.zeros((S, d))
    for s in range(S):
        for i in range(d):
            out[s, i] = poly.polyval(spec.roof[s], poly.polyint(coef[s, i]))
    return out


@lru_cache(maxsize=64)
def _centered(spec_json: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    spec = SuspensionSpec.model_validate_json(spec_json)
    coef = np.array(spec.raw_coefficients, dtype=float)
    shift = (spec.base.stationary @ _raw_eta(spec)) / roof_mean(spec)
    coef[:, :, 0] -= shift
    S, d, K = coef.shape
    eta_poly = np.zeros((S, d, K + 1))
    area_poly = np.zeros((S, d, d, 2 * K + 1))
    for s in range(S):
        for i in range(d):
            eta_poly[s, i] = poly.polyint(coef[s, i])
        for i in range(d):
            for j in range(d):
                # F_ij(r) = int_0^r xi_j(h) int_0^h xi_i(v) dv dh
                area = poly.polyint(poly.polymul(coef[s, j], eta_poly[s, i]))
                area_poly[s, i, j, :area.shape[0]] = area
    for array in (coef, eta_poly, area_poly):
        array.setflags(write=False)
    return coef, eta_poly, area_poly


def centered_polynomials(spec: SuspensionSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(fiber coefficients, eta antiderivatives, area antiderivatives), all centered."""
    return _centered(spec.model_dump_json())


def _powers(r: np.ndarray, degree: int) -> np.ndarray:
    return np.asarray(r, dtype=float)[..., None] ** np.arange(degree)


def partial_integrals(spec: SuspensionSpec, states: np.ndarray, heights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fiber integrals up to the given heights.

    Returns:
        (eta, area) with shapes states.shape + (d,) and states.shape + (d, d)
    """
    _, eta_poly, area_poly = centered_polynomials(spec)
    eta = np.einsum("...k,...ik->...i", _powers(heights, eta_poly.shape[-1]), eta_poly[states])
    area = np.einsum("...k,...ijk->...ij", _powers(heights, area_poly.shape[-1]), area_poly[states])
    return eta, area


def eta_values(spec: SuspensionSpec) -> np.ndarray:
    """Centered eta(state) = int_0^tau xi, shape (S, d)."""
    states = np.arange(spec.base.states)
    return partial_integrals(spec, states, spec.roof)[0]


def fiber_area(spec: SuspensionSpec) -> np.ndarray:
    """Per-state fiber area F_ij(state), shape (S, d, d)."""
    states = np.arange(spec.base.states)
    return partial_integrals(spec, states, spec.roof)[1]


def fiber_area_mean(spec: SuspensionSpec) -> np.ndarray:
    """Fbar = E_pi F."""
    return np.einsum("s,sij->ij", spec.base.stationary, fiber_area(spec))


def eta_spec(spec: SuspensionSpec) -> MarkovMixingSpec:
    """The base chain observed through eta, as a centered mixing spec."""
    base = spec.base
    return MarkovMixingSpec(
        states=base.states,
        P=base.transition,
        g=eta_values(spec),
        pi=base.stationary if base.pi is not None else None,
        centered=False,
        auto_center=True,
        name=f"{spec.label}-eta",
    )


def eta_covariance_summary(spec: SuspensionSpec, tail_tol: float = None) -> CovarianceSummary:
    """Gamma^eta, varsigma^eta and E eta (x) eta of the eta sequence."""
    return covariance_summary(eta_spec(spec), tail_tol)


def continuous_limit_covariance(spec: SuspensionSpec) -> np.ndarray:
    """Long-run covariance per unit of flow time, varsigma^eta / taubar."""
    return eta_covariance_summary(spec).sigma / roof_mean(spec)


@dataclass(frozen=True)
class SuspensionBatch:
    """
    Padded per-fiber increments for a block of replicas.

    Cells past a replica's final fragment carry zero increments, which the
    Davie step maps to the identity.

    Attributes:
        u: eps * eta per cell, shape (R, K, d)
        m: eps^2 * F per cell, shape (R, K, d, d)
        real_time: Flow-time length eps^2 * (fiber time) per cell, shape (R, K)
        full_fibers: n(T taubar / eps^2) per replica
        states: Base states, shape (R, K)
        roofs: Cumulative roof sums R_k, shape (R, K + 1)
    """

    u: np.ndarray
    m: np.ndarray
    real_time: np.ndarray
    full_fibers: np.ndarray
    states: np.ndarray
    roofs: np.ndarray

    def terminal(self) -> Tuple[np.ndarray, np.ndarray]:
        """(V(T), VV(T)) per replica."""
        x = np.cumsum(self.u, axis=1)
        prefix = np.concatenate([np.zeros_like(x[:, :1]), x[:, :-1]], axis=1)
        vv = np.sum(prefix[:, :, :, None] * self.u[:, :, None, :] + self.m, axis=1)
        return x[:, -1], vv


def fiber_capacity(spec: SuspensionSpec, eps: float, T: float) -> int:
    """Fibers sampled per replica; always more than fit into the horizon."""
    horizon = T * roof_mean(spec) / eps ** 2
    return int(math.ceil(horizon * spec.bound)) + 2


def _check(eps: float, T: float):
    if not eps > 0 or not T > 0:
        raise InvalidParameterError(f"eps and T must be positive, got eps={eps}, T={T}")


def suspension_batch(spec: SuspensionSpec, eps: float, T: float, seed: int,
                     start: int = 0, stop: int = 1) -> SuspensionBatch:
    """Per-fiber increments for replicas ``start..stop-1`` on [0, T]."""
    _check(eps, T)
    capacity = fiber_capacity(spec, eps, T)
    states = sample_states(spec.base, capacity, seed, start, stop)
    tau = spec.roof[states]
    roofs = np.concatenate([np.zeros((states.shape[0], 1)), np.cumsum(tau, axis=1)], axis=1)
    horizon = T * roof_mean(spec) / eps ** 2
    full = np.sum(roofs[:, 1:] <= horizon, axis=1)

    cells = np.arange(capacity)[None, :]
    fragment = np.clip(horizon - roofs[:, :-1], 0.0, None)
    heights = np.where(cells < full[:, None], tau, np.where(cells == full[:, None], fragment, 0.0))
    eta, area = partial_integrals(spec, states, heights)
    return SuspensionBatch(
        u=eps * eta,
        m=eps ** 2 * area,
        real_time=eps ** 2 * heights,
        full_fibers=full,
        states=states,
        roofs=roofs,
    )


@dataclass(frozen=True)
class SuspensionRecord:
    """
    One sampled suspension trajectory on [0, T].

    ``path`` is the (V, VV) rough path on fiber boundaries
    t_k = eps^2 R_k / taubar, closed by a partial fiber at T.
    """

    path: CadlagRoughPath
    eta: np.ndarray
    states: np.ndarray
    renewal_times: np.ndarray
    real_time: np.ndarray
    eps: float
    taubar: float

    def renewal_count(self, s):
        """n(s) = max{k : sum_{j<k} tau(state_j) <= s}, vectorised over s."""
        s = np.asarray(s, dtype=float)
        if np.any(s > self.renewal_times[-1]):
            raise InvalidParameterError("renewal count requested beyond the sampled fibers")
        return np.searchsorted(self.renewal_times, s, side="right") - 1


def suspension_sample(spec: SuspensionSpec, eps: float, T: float, seed: int, replica: int = 0) -> SuspensionRecord:
    """Sample V^eps, VV^eps, the eta sequence and renewal times for one replica."""
    batch = suspension_batch(spec, eps, T, seed, replica, replica + 1)
    taubar = roof_mean(spec)
    n = int(batch.full_fibers[0])
    boundaries = eps ** 2 * batch.roofs[0, :n + 1] / taubar
    has_fragment = bool(batch.real_time[0, n] > 0 and boundaries[-1] < T)
    cells = n + (1 if has_fragment else 0)
    grid = np.append(boundaries, T) if has_fragment else boundaries
    path = CadlagRoughPath(grid, batch.u[0, :cells], batch.m[0, :cells])
    return SuspensionRecord(
        path=path,
        eta=batch.u[0, :n] / eps,
        states=batch.states[0],
        renewal_times=batch.roofs[0],
        real_time=batch.real_time[0, :cells],
        eps=float(eps),
        taubar=taubar,
    )
