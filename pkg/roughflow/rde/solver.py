"""
Davie scheme for cadlag rough differential equations.

    dY = b(Y) dA + sigma(Y) dX,   X = (U, UU) a cadlag rough path,

with a nondecreasing drift clock A. One step over [s, t] is

    Y_t = Y_s + b(Y_s) (A(t) - A(s)) + sigma(Y_s) U(s,t)
          + sum_{i,j,k} d_k sigma_{.j}(Y_s) sigma_{ki}(Y_s) UU_ij(s,t),

where UU_ij pairs coordinate i before coordinate j. Driven by the canonical
lift of N^{-1/2} xi with clock [tN]/N on the lift's own grid, the scheme is
the discrete recurrence Y + b/N + N^{-1/2} sigma xi.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from roughflow import settings
from roughflow.errors import (
    DimensionMismatchError,
    ExplosionError,
    GridMismatchError,
    InvalidParameterError,
    NonFiniteStateError,
)
from roughflow.log import get_logger
from roughflow.rde.fields import FieldSpec
from roughflow.tensor_core.io import write_solution_csv
from roughflow.tensor_core.path import CadlagRoughPath

logger = get_logger(__name__)

Clock = Callable[[np.ndarray], np.ndarray]

CLOCK_SLACK = 1e-9


def identity_clock(t):
    return np.asarray(t, dtype=float)


def step_clock(N: int) -> Clock:
    """A_N(s) = [sN] / N."""
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N}")
    N = int(N)

    def clock(t):
        return np.floor(np.asarray(t, dtype=float) * N + CLOCK_SLACK) / N

    clock.__name__ = f"step_clock({N})"
    return clock


@dataclass(frozen=True, eq=False)
class RDEProblem:
    """Fields, initial state, driver and drift clock."""

    fields: FieldSpec
    y0: np.ndarray
    driver: CadlagRoughPath
    drift_clock: Clock = identity_clock

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        if y0.shape != (self.fields.e,):
            raise DimensionMismatchError(f"y0 must have shape ({self.fields.e},), got {y0.shape}")
        if self.driver.dim != self.fields.d:
            raise DimensionMismatchError(
                f"driver dimension {self.driver.dim} does not match noise dimension {self.fields.d}"
            )
        object.__setattr__(self, "y0", y0)


@dataclass(frozen=True, eq=False)
class SolutionPath:
    """
    States Y(t_i) on the solver partition.

    Attributes:
        times: Partition times, shape (n+1,)
        states: Y(t_i), shape (n+1, e)
        scheme: Name of the scheme that produced it
        partition: Grid indices of the driver used as partition
    """

    times: np.ndarray
    states: np.ndarray
    scheme: str = "davie"
    partition: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def terminal(self) -> np.ndarray:
        return self.states[-1]

    def state_at(self, t: float) -> np.ndarray:
        """Cadlag state at ``t``: the last partition state at or before ``t``."""
        k = int(np.searchsorted(self.times, float(t), side="right")) - 1
        return self.states[min(max(k, 0), len(self.times) - 1)]

    def sup_distance(self, other: "SolutionPath") -> float:
        if self.times.shape != other.times.shape or not np.array_equal(self.times, other.times):
            raise GridMismatchError("solutions must share their partition")
        return float(np.max(np.linalg.norm(self.states - other.states, axis=-1)))

    def write_csv(self, file_path: Union[str, Path]) -> Path:
        return write_solution_csv(self.times, self.states, file_path)


def check_state(y: np.ndarray, step: int, time: Optional[float] = None, bound: Optional[float] = None):
    """Raise on NaN / inf or on states beyond the explosion bound."""
    limit = settings.EXPLOSION_BOUND if bound is None else bound
    if not np.all(np.isfinite(y)):
        raise NonFiniteStateError(f"solver state became non-finite at step {step} (t={time})", step, time)
    size = float(np.max(np.abs(y), initial=0.0))
    if size > limit:
        raise ExplosionError(f"solver state {size:.3g} exceeds bound {limit:g} at step {step} (t={time})",
                             step, time)


def davie_step(y: np.ndarray, fields: FieldSpec, da, u: np.ndarray, m: np.ndarray) -> np.ndarray:
    """
    One Davie step; batched over leading axes of ``y``, ``u`` and ``m``.

    Args:
        y: States, shape (..., e)
        fields: Vector fields
        da: Drift-clock increment, scalar or shape (...)
        u: First-level increment, shape (..., d)
        m: Second-level increment, shape (..., d, d)
    """
    s = fields.sigma(y)
    da = np.asarray(da, dtype=float)
    correction = np.einsum("...ajk,...ki,...ij->...a", fields.dsigma(y), s, m)
    return y + fields.b(y) * da[..., None] + np.einsum("...ij,...j->...i", s, u) + correction


def partition_indices(driver: CadlagRoughPath, partition=None) -> np.ndarray:
    """Grid indices of a partition given as times; the full grid when omitted."""
    if partition is None:
        return np.arange(driver.cells + 1)
    idx = np.array([driver.index_of(t) for t in np.asarray(partition, dtype=float).reshape(-1)], dtype=int)
    if idx.shape[0] < 1 or idx[0] != 0:
        raise GridMismatchError("partition must start at the first grid point of the driver")
    if np.any(np.diff(idx) <= 0):
        raise GridMismatchError("partition times must be strictly increasing")
    return idx


def solve_rde(problem: RDEProblem, partition: Optional[Sequence[float]] = None) -> SolutionPath:
    """
    Iterate ``davie_step`` over a partition of the driver grid.

    Args:
        problem: RDE problem
        partition: Times, all on the driver grid and starting at its first
            point; every cell of the driver when omitted

    Returns:
        SolutionPath on the partition

    Raises:
        GridMismatchError: a partition time is not a grid point
        NonFiniteStateError / ExplosionError: state left the finite range
    """
    driver = problem.driver
    idx = partition_indices(driver, partition)
    if idx.shape[0] == driver.cells + 1:
        u, m = driver.level1, driver.level2
    else:
        merged = driver.coarsen(idx)
        u, m = merged.level1, merged.level2
    times = driver.grid[idx]
    clock = np.asarray(problem.drift_clock(times), dtype=float)
    da = np.diff(clock)
    if np.any(da < 0):
        raise InvalidParameterError("drift clock must be nondecreasing")
    states = np.empty((idx.shape[0], problem.fields.e))
    y = problem.y0.copy()
    states[0] = y
    for k in range(idx.shape[0] - 1):
        y = davie_step(y, problem.fields, da[k], u[k], m[k])
        check_state(y, k + 1, float(times[k + 1]))
        states[k + 1] = y
    return SolutionPath(times=times, states=states, scheme="davie", partition=idx)


def solve_rde_batch(
    fields: FieldSpec,
    y0: np.ndarray,
    u: np.ndarray,
    m: np.ndarray,
    da: np.ndarray,
    keep_path: bool = False,
) -> np.ndarray:
    """
    Davie scheme over many replicas at once.

    Args:
        fields: Vector fields
        y0: Initial state, shape (e,) or (R, e)
        u: Cell increments, shape (R, n, d)
        m: Cell second levels, shape (R, n, d, d)
        da: Drift-clock increments, shape (n,) shared or (R, n) per replica
        keep_path: Return all states instead of terminal ones

    Returns:
        (R, e) terminal states, or (R, n+1, e) when ``keep_path``
    """
    u = np.asarray(u, dtype=float)
    m = np.asarray(m, dtype=float)
    R, n, d = u.shape
    if d != fields.d or m.shape != (R, n, d, d):
        raise DimensionMismatchError(f"increments of shape {u.shape} / {m.shape} do not fit d={fields.d}")
    da = np.asarray(da, dtype=float)
    if da.shape == (n,):
        da = np.broadcast_to(da, (R, n))
    if da.shape != (R, n):
        raise DimensionMismatchError(f"drift increments must have shape ({n},) or ({R}, {n}), got {da.shape}")
    y = np.broadcast_to(np.asarray(y0, dtype=float), (R, fields.e)).copy()
    path = np.empty((R, n + 1, fields.e)) if keep_path else None
    if keep_path:
        path[:, 0] = y
    for k in range(n):
        y = davie_step(y, fields, da[:, k], u[:, k], m[:, k])
        check_state(y, k + 1)
        if keep_path:
            path[:, k + 1] = y
    return path if keep_path else y


def recurrence_solve(fields: FieldSpec, xi: np.ndarray, N: int, y0: np.ndarray) -> SolutionPath:
    """
    X((n+1)/N) = X(n/N) + b(X) / N + N^{-1/2} sigma(X) xi(n).

    Accepts a single sequence of shape (n, d) or a batch (R, n, d); for a
    batch the returned states have shape (R, n+1, e).
    """
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N}")
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 2
    batch = xi[None] if single else xi
    R, n, d = batch.shape
    if d != fields.d:
        raise DimensionMismatchError(f"xi has dimension {d}, fields expect {fields.d}")
    u = batch / np.sqrt(N)
    y = np.broadcast_to(np.asarray(y0, dtype=float), (R, fields.e)).copy()
    states = np.empty((R, n + 1, fields.e))
    states[:, 0] = y
    for k in range(n):
        y = y + fields.b(y) * (1.0 / N) + np.einsum("...ij,...j->...i", fields.sigma(y), u[:, k])
        check_state(y, k + 1, (k + 1) / N)
        states[:, k + 1] = y
    times = np.arange(n + 1) / N
    return SolutionPath(times=times, states=states[0] if single else states, scheme="recurrence")
