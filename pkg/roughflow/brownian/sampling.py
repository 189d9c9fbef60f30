"""
Sampling of Brownian rough paths on uniform grids.

First-level cell increments are exact Gaussians with covariance Sigma h.
The Ito area of a cell is the left-point Riemann sum over K Gaussian
substeps, which carries an O(h / sqrt(K)) root-mean-square error, and
Gamma h is added on top.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from roughflow.brownian.params import BrownianRoughPathParams
from roughflow.errors import GridMismatchError, InvalidParameterError
from roughflow.rng import STREAM_NOISE, generator
from roughflow.tensor_core.path import CadlagRoughPath


@dataclass(frozen=True, eq=False)
class GridRoughSample:
    """A sampled Brownian rough path with its sampling metadata."""

    path: CadlagRoughPath
    params: BrownianRoughPathParams
    mesh: float
    substeps: int
    seed: int
    replica: int = 0

    @property
    def horizon(self) -> float:
        return float(self.path.grid[-1])

    @property
    def cells_per_unit(self) -> float:
        return 1.0 / self.mesh


def grid_cells(T: float, h: float) -> int:
    """Number of cells of mesh ``h`` in [0, T]; raises unless h divides T."""
    if not h > 0 or not T > 0:
        raise InvalidParameterError(f"horizon and mesh must be positive, got T={T}, h={h}")
    n = int(round(T / h))
    if n < 1 or abs(n * h - T) > 1e-9 * T:
        raise GridMismatchError(f"mesh {h} does not divide horizon {T}")
    return n


def substep_increments(params: BrownianRoughPathParams, cells: int, h: float, substeps: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Gaussian substep increments, shape (cells, K, d)."""
    z = rng.standard_normal((cells, substeps, params.dim))
    return np.sqrt(h / substeps) * z @ params.root.T


def lift_substeps(params: BrownianRoughPathParams, dw: np.ndarray, h: float):
    """(cell increments, cell areas) from substep increments."""
    u = dw.sum(axis=1)
    before = np.cumsum(dw, axis=1) - dw
    area = np.einsum("nki,nkj->nij", before, dw) + params.gamma * h
    return u, area


def sample_brp(
    params: BrownianRoughPathParams,
    T: float,
    h: float,
    substeps: int = 8,
    seed: int = 0,
    replica: int = 0,
) -> GridRoughSample:
    """
    Sample (W, WW) on the grid k h of [0, T].

    Args:
        params: (Sigma, Gamma)
        T: Horizon, an integer multiple of ``h``
        h: Mesh
        substeps: Riemann substeps K per cell for the area
        seed: Master seed
        replica: Replica index selecting the random stream

    Returns:
        GridRoughSample
    """
    if int(substeps) != substeps or substeps < 1:
        raise InvalidParameterError(f"substeps must be a positive integer, got {substeps}")
    n = grid_cells(T, h)
    rng = generator(seed, STREAM_NOISE, replica)
    dw = substep_increments(params, n, h, int(substeps), rng)
    u, area = lift_substeps(params, dw, h)
    grid = np.arange(n + 1) * h
    return GridRoughSample(CadlagRoughPath(grid, u, area), params, float(h), int(substeps), seed, replica)


def rescale(sample: GridRoughSample, N: float, horizon: Optional[float] = None) -> GridRoughSample:
    """
    W_N(t) = N^{-1/2} W(N t) with second level scaled by 1/N.

    Args:
        sample: Universal sample on [0, T_u]
        N: Scale factor, N >= 1
        horizon: Keep [0, horizon] of the rescaled path; N * horizon must be
            a grid point of the universal sample

    Returns:
        GridRoughSample on [0, T_u / N] or [0, horizon]
    """
    if not N >= 1:
        raise InvalidParameterError(f"rescaling factor must be >= 1, got {N}")
    path = sample.path
    if horizon is not None:
        end = N * horizon
        if end > sample.horizon * (1 + 1e-12):
            raise GridMismatchError(f"universal sample ends at {sample.horizon}, need {end}")
        try:
            k = path.index_of(end)
        except GridMismatchError:
            raise GridMismatchError(
                f"universal mesh {sample.mesh} does not divide the scaled horizon {end}"
            ) from None
        path = path.restrict(0, k)
    scaled = CadlagRoughPath(path.grid / N, path.level1 / np.sqrt(N), path.level2 / N)
    return GridRoughSample(scaled, sample.params, sample.mesh / N, sample.substeps, sample.seed, sample.replica)


def coarsen_to(sample: GridRoughSample, cells_per_unit: int) -> GridRoughSample:
    """Merge cells (Chen products) down to ``cells_per_unit`` cells per time unit."""
    ratio = round(sample.cells_per_unit / cells_per_unit)
    if ratio < 1 or abs(ratio * cells_per_unit - sample.cells_per_unit) > 1e-9 * sample.cells_per_unit:
        raise GridMismatchError(
            f"cannot coarsen mesh {sample.mesh} to {cells_per_unit} cells per unit"
        )
    if ratio == 1:
        return sample
    idx = np.arange(0, sample.path.cells + 1, ratio)
    if idx[-1] != sample.path.cells:
        raise GridMismatchError("coarsening ratio does not divide the number of cells")
    return GridRoughSample(sample.path.coarsen(idx), sample.params, sample.mesh * ratio,
                           sample.substeps, sample.seed, sample.replica)


def em_lift(sample: GridRoughSample, N: int) -> CadlagRoughPath:
    """
    Piecewise-constant lift of W sampled at k/N, on the sample's own grid.

    The cell ending at k/N carries W((k-1)/N, k/N); all other cells are
    zero and no cell has its own second level, so the second level over any
    span is the iterated sum of the coarse increments.
    """
    if int(N) != N or N < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {N}")
    ratio = sample.cells_per_unit / N
    r = int(round(ratio))
    if r < 1 or abs(r - ratio) > 1e-9 * ratio:
        raise GridMismatchError(f"N = {N} does not divide the sample resolution {sample.cells_per_unit:g}")
    path = sample.path
    if path.cells % r:
        raise GridMismatchError(f"{path.cells} cells are not a multiple of {r}")
    ends = np.arange(r, path.cells + 1, r)
    x = path.prefix_level1
    level1 = np.zeros_like(path.level1)
    level1[ends - 1] = x[ends] - x[ends - r]
    return CadlagRoughPath(path.grid, level1, np.zeros_like(path.level2))


def sample_universal(params: BrownianRoughPathParams, N_max: float, cells_per_unit: int, N_min: float,
                     substeps: int = 4, seed: int = 0) -> GridRoughSample:
    """
    Universal sample on [0, N_max] fine enough that every W_N, N >= N_min,
    has ``cells_per_unit`` cells on [0, 1].
    """
    h = N_min / cells_per_unit
    return sample_brp(params, float(N_max), h, substeps, seed)