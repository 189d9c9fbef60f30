"""
The limiting Ito diffusion.

    dXi = sigma(Xi) dW + (b + c)(Xi) dt,
    c_i(x) = sum_{j,k,l} d sigma_ij / d x_k (x) (gamma_hat + extra)_jl sigma_kl(x),

solved by Euler-Maruyama.
"""

from typing import Callable, Optional, Sequence

import numpy as np

from roughflow.errors import DimensionMismatchError, InvalidParameterError
from roughflow.rde.fields import FieldSpec
from roughflow.rde.solver import SolutionPath, check_state, identity_clock, partition_indices
from roughflow.tensor_core.path import CadlagRoughPath

Drift = Callable[[np.ndarray], np.ndarray]


def correction_matrix(fields: FieldSpec, gamma_hat, extra=None) -> np.ndarray:
    G = np.atleast_2d(np.asarray(gamma_hat, dtype=float))
    if extra is not None:
        G = G + np.atleast_2d(np.asarray(extra, dtype=float))
    if G.shape != (fields.d, fields.d):
        raise DimensionMismatchError(f"gamma_hat must have shape ({fields.d}, {fields.d}), got {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InvalidParameterError("gamma_hat has non-finite entries")
    return G


def drift_correction(fields: FieldSpec, gamma_hat, extra=None) -> Drift:
    """The correction c alone."""
    G = correction_matrix(fields, gamma_hat, extra)

    def c(x):
        return np.einsum("...ijk,jl,...kl->...i", fields.dsigma(x), G, fields.sigma(x))

    return c


def corrected_drift(fields: FieldSpec, gamma_hat, extra=None, scale: float = 1.0) -> Drift:
    """
    x -> scale * b(x) + c(x).

    Args:
        fields: Vector fields
        gamma_hat: d x d one-sided covariance sum
        extra: Added to gamma_hat; half of E eta (x) eta for suspension flows
        scale: Multiplier of b, the mean roof for suspension flows
    """
    c = drift_correction(fields, gamma_hat, extra)

    def drift(x):
        return scale * fields.b(x) + c(x)

    return drift


def euler_maruyama(fields: FieldSpec, drift: Drift, y0: np.ndarray, dw: np.ndarray,
                   dt: np.ndarray, keep_path: bool = False) -> np.ndarray:
    """
    Batched Euler-Maruyama.

    Args:
        dw: Brownian increments, shape (R, n, d)
        dt: Time steps, shape (n,)

    Returns:
        (R, e) terminal states, or (R, n+1, e) when ``keep_path``
    """
    dw = np.asarray(dw, dtype=float)
    R, n, d = dw.shape
    if d != fields.d:
        raise DimensionMismatchError(f"increments have dimension {d}, fields expect {fields.d}")
    dt = np.asarray(dt, dtype=float)
    if dt.shape != (n,):
        raise DimensionMismatchError(f"dt must have shape ({n},), got {dt.shape}")
    y = np.broadcast_to(np.asarray(y0, dtype=float), (R, fields.e)).copy()
    path = np.empty((R, n + 1, fields.e)) if keep_path else None
    if keep_path:
        path[:, 0] = y
    for k in range(n):
        y = y + drift(y) * dt[k] + np.einsum("...ij,...j->...i", fields.sigma(y), dw[:, k])
        check_state(y, k + 1)
        if keep_path:
            path[:, k + 1] = y
    return path if keep_path else y


def ito_sde_solve(
    fields: FieldSpec,
    drift: Drift,
    y0: np.ndarray,
    brownian: CadlagRoughPath,
    partition: Optional[Sequence[float]] = None,
    clock=identity_clock,
) -> SolutionPath:
    """
    Euler-Maruyama driven by the first level of a Brownian path.

    Args:
        fields: Supplies sigma; its own drift is ignored in favour of ``drift``
        drift: Usually ``corrected_drift(...)``
        y0: Initial state
        brownian: Path whose first level is the Brownian motion
        partition: Times on the path grid; every cell when omitted
        clock: Time change applied to the step lengths
    """
    idx = partition_indices(brownian, partition)
    x = brownian.prefix_level1
    dw = np.diff(x[idx], axis=0)
    times = brownian.grid[idx]
    dt = np.diff(np.asarray(clock(times), dtype=float))
    states = euler_maruyama(fields, drift, np.atleast_1d(y0), dw[None], dt, keep_path=True)[0]
    return SolutionPath(times=times, states=states, scheme="euler-maruyama", partition=idx)


def geometric_solution(y0: float, w, t, sigma: float = 1.0, gamma: float = 0.0):
    """
    Exact solution of dY = Y dW driven by a 1-d Brownian rough path (sigma, gamma).

    Y(t) = y0 exp(W(t) + (gamma - sigma / 2) t).
    """
    return y0 * np.exp(np.asarray(w, dtype=float) + (gamma - 0.5 * sigma) * np.asarray(t, dtype=float))


def stratonovich_geometric_solution(y0: float, w):
    """Y(t) = y0 exp(W(t)) for the Stratonovich lift."""
    return y0 * np.exp(np.asarray(w, dtype=float))
