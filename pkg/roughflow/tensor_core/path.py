"""
Cadlag level-2 rough paths on a finite grid.

Only per-cell increments are stored. Every span increment is derived from
running prefixes through the group law, so Chen's relation holds by
construction.

Two increment conventions are exposed:

- ``rebased_increment(i, j)``: the rough path increment
  U(s,t) = X(t) - X(s), UU(s,t) = M(t) - M(s) - X(s) (x) (X(t) - X(s)),
  i.e. iterated sums restarted at s. Used by the solver, norms and distances.
- ``span_increment(i, j)``: the plain difference M(t) - M(s) of the second
  level measured from the path origin.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from roughflow import settings
from roughflow.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError
from roughflow.tensor_core.group import Level2GroupElement, check_dilation


@dataclass(frozen=True, eq=False)
class CadlagRoughPath:
    """
    Piecewise-constant rough path with one jump per grid cell.

    Attributes:
        grid: Strictly increasing times t_0 < ... < t_n
        level1: Cell increments U(t_k, t_{k+1}), shape (n, d)
        level2: Cell second-level increments, shape (n, d, d)
    """

    grid: np.ndarray
    level1: np.ndarray
    level2: np.ndarray
    _x: np.ndarray = field(init=False, repr=False)
    _m: np.ndarray = field(init=False, repr=False)
    _q: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float).reshape(-1)
        level1 = np.array(self.level1, dtype=float)
        n = grid.shape[0] - 1
        if n < 0:
            raise GridMismatchError("a rough path needs at least one grid point")
        if level1.ndim == 1:
            level1 = level1.reshape(n, -1) if n > 0 else level1.reshape(0, max(level1.size, 1))
        d = level1.shape[1] if level1.ndim == 2 else 0
        level2 = np.array(self.level2, dtype=float).reshape(n, d, d)
        if level1.shape != (n, d):
            raise DimensionMismatchError(f"level1 must have shape ({n}, d), got {level1.shape}")
        if n > 0 and not np.all(np.diff(grid) > 0):
            raise GridMismatchError("grid must be strictly increasing")

        x = np.zeros((n + 1, d))
        np.cumsum(level1, axis=0, out=x[1:])
        # M_{k+1} = M_k + X_k (x) u_k + m_k
        m = np.zeros((n + 1, d, d))
        np.cumsum(x[:-1, :, None] * level1[:, None, :] + level2, axis=0, out=m[1:])
        q = np.zeros((n + 1, d, d))
        np.cumsum(level1[:, :, None] * level1[:, None, :], axis=0, out=q[1:])

        for name, value in (("grid", grid), ("level1", level1), ("level2", level2),
                            ("_x", x), ("_m", m), ("_q", q)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    # -- shape ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.level1.shape[1]

    @property
    def cells(self) -> int:
        return self.level1.shape[0]

    @property
    def horizon(self) -> Tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def prefix_level1(self) -> np.ndarray:
        """X(t_k) for every grid point, shape (n+1, d)."""
        return self._x

    @property
    def prefix_level2(self) -> np.ndarray:
        """M(t_k), the second level from t_0, shape (n+1, d, d)."""
        return self._m

    # -- grid lookup ---------------------------------------------------

    def index_of(self, t: float) -> int:
        """Grid index of time ``t``; raises if ``t`` is not a grid point."""
        t = float(t)
        k = int(np.searchsorted(self.grid, t))
        tol = settings.TOLERANCE * max(1.0, abs(t))
        for cand in (k - 1, k):
            if 0 <= cand < self.grid.shape[0] and abs(self.grid[cand] - t) <= tol:
                return cand
        raise GridMismatchError(f"time {t!r} is not on the grid [{self.grid[0]}, {self.grid[-1]}]")

    def window_indices(self, window: Optional[Sequence[float]] = None) -> Tuple[int, int]:
        if window is None:
            return 0, self.cells
        lo, hi = self.index_of(window[0]), self.index_of(window[1])
        if hi < lo:
            raise GridMismatchError(f"window end {window[1]} precedes start {window[0]}")
        return lo, hi

    def _check_pair(self, i: int, j: int):
        if not (0 <= i <= j <= self.cells):
            raise GridMismatchError(f"span ({i}, {j}) outside grid of {self.cells} cells")

    # -- increments ----------------------------------------------------

    def increment(self, i: int, j: int) -> np.ndarray:
        self._check_pair(i, j)
        return self._x[j] - self._x[i]

    def rebased_increment(self, i: int, j: int) -> np.ndarray:
        """Second level over [t_i, t_j] with sums restarted at t_i."""
        self._check_pair(i, j)
        return self._m[j] - self._m[i] - np.outer(self._x[i], self._x[j] - self._x[i])

    def span_increment(self, i: int, j: int) -> np.ndarray:
        """Plain difference M(t_j) - M(t_i) of the origin-based second level."""
        self._check_pair(i, j)
        return self._m[j] - self._m[i]

    def span_element(self, i: int, j: int) -> Level2GroupElement:
        return Level2GroupElement(self.increment(i, j), self.rebased_increment(i, j))

    def bracket(self, i: int, j: int) -> np.ndarray:
        """Quadratic covariation sum of u (x) u over cells in [t_i, t_j)."""
        self._check_pair(i, j)
        return self._q[j] - self._q[i]

    def rebased_rows(self, i: int, js: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorised (U(t_i, t_j), UU(t_i, t_j)) for an array of end indices."""
        dx = self._x[js] - self._x[i]
        dm = self._m[js] - self._m[i] - self._x[i][None, :, None] * dx[:, None, :]
        return dx, dm

    def value_at(self, t: float) -> Level2GroupElement:
        """
        Cadlag value (X(t), M(t)) relative to t_0.

        The value is constant on [t_k, t_{k+1}); times before t_0 map to the
        origin and times after t_n to the terminal value.
        """
        k = int(np.searchsorted(self.grid, float(t), side="right")) - 1
        k = min(max(k, 0), self.cells)
        return Level2GroupElement(self._x[k], self._m[k])

    # -- derived paths -------------------------------------------------

    def dilate(self, lam: float) -> "CadlagRoughPath":
        lam = check_dilation(lam)
        return CadlagRoughPath(self.grid, lam * self.level1, lam * lam * self.level2)

    def with_grid(self, grid: np.ndarray) -> "CadlagRoughPath":
        """Same increments placed on another grid of equal length."""
        return CadlagRoughPath(grid, self.level1, self.level2)

    def coarsen(self, indices: Sequence[int]) -> "CadlagRoughPath":
        """
        Merge cells so only the given grid indices remain.

        Merged cells carry Chen products of the original cells, so every span
        between kept indices is unchanged.
        """
        idx = np.asarray(indices, dtype=int)
        if idx.ndim != 1 or idx.shape[0] < 1 or np.any(np.diff(idx) <= 0):
            raise GridMismatchError("coarsening indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] > self.cells:
            raise GridMismatchError(f"coarsening indices outside grid of {self.cells} cells")
        starts, ends = idx[:-1], idx[1:]
        level1 = self._x[ends] - self._x[starts]
        level2 = (self._m[ends] - self._m[starts]
                  - self._x[starts][:, :, None] * level1[:, None, :])
        return CadlagRoughPath(self.grid[idx], level1, level2)

    def restrict(self, i: int, j: int) -> "CadlagRoughPath":
        self._check_pair(i, j)
        return CadlagRoughPath(self.grid[i:j + 1], self.level1[i:j], self.level2[i:j])

    def concatenate(self, other: "CadlagRoughPath") -> "CadlagRoughPath":
        """Append ``other`` whose first grid point equals this path's last."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"cannot join paths of dimension {self.dim} and {other.dim}")
        if abs(other.grid[0] - self.grid[-1]) > settings.TOLERANCE * max(1.0, abs(self.grid[-1])):
            raise GridMismatchError(f"paths do not meet: {self.grid[-1]} vs {other.grid[0]}")
        return CadlagRoughPath(
            np.concatenate([self.grid, other.grid[1:]]),
            np.concatenate([self.level1, other.level1]),
            np.concatenate([self.level2, other.level2]),
        )

    def is_canonical(self) -> bool:
        """True when no cell carries its own second level."""
        return not np.any(self.level2)


def zero_path(grid: np.ndarray, dim: int) -> CadlagRoughPath:
    n = len(grid) - 1
    return CadlagRoughPath(grid, np.zeros((n, dim)), np.zeros((n, dim, dim)))


def canonical_lift(
    xi: Union[Sequence, np.ndarray],
    N: int,
    t0: float = 0.0,
    t_max: Optional[float] = None,
) -> CadlagRoughPath:
    """
    Lift a discrete sequence to its cadlag rough path of iterated sums.

    Cell k covers [t0 + k/N, t0 + (k+1)/N) and jumps by N^{-1/2} xi(k) with
    zero within-cell second level, so derived spans reproduce
    S_N(t) = N^{-1/2} sum_{k<[Nt]} xi(k) and the strictly ordered iterated
    sums N^{-1} sum_{k<l} xi_i(k) xi_j(l).

    Args:
        xi: Sequence of n vectors, shape (n, d) or (n,) for d = 1
        N: Resolution
        t0: Start time
        t_max: Optional horizon; more than N * t_max terms is an error

    Returns:
        CadlagRoughPath on the grid t0 + k/N, k = 0..n
    """
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N}")
    N = int(N)
    values = np.asarray(xi, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise DimensionMismatchError(f"xi must be a sequence of vectors, got shape {values.shape}")
    n, d = values.shape
    if t_max is not None and n > N * t_max + settings.TOLERANCE:
        raise InvalidParameterError(f"{n} terms exceed N * T = {N * t_max}")
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError("xi contains non-finite entries")
    grid = t0 + np.arange(n + 1) / N
    return CadlagRoughPath(grid, values / np.sqrt(N), np.zeros((n, d, d)))


def dilate(x, lam: float):
    """Dilation by ``lam``: first level scaled by lam, second by lam^2."""
    if isinstance(x, (Level2GroupElement, CadlagRoughPath)):
        return x.dilate(lam)
    raise TypeError(f"cannot dilate object of type {type(x).__name__}")


def symmetric_defect(path: CadlagRoughPath, i: int, j: int) -> float:
    """
    Size of UU + UU^T + [U] - U (x) U over [t_i, t_j].

    Zero for canonical lifts, where [U] is the bracket sum of u (x) u.
    """
    u = path.increment(i, j)
    uu = path.rebased_increment(i, j)
    return float(np.max(np.abs(uu + uu.T + path.bracket(i, j) - np.outer(u, u)), initial=0.0))
