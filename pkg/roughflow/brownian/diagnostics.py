"""
Diagnostics for Brownian rough path samples: Ito-area accuracy and the
growth of |||W_N||| across scales.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from roughflow.brownian.params import BrownianRoughPathParams
from roughflow.brownian.sampling import GridRoughSample, coarsen_to, rescale, sample_universal
from roughflow.errors import DimensionMismatchError, InvalidParameterError
from roughflow.log import get_logger
from roughflow.tensor_core.io import FLOAT_FORMAT
from roughflow.tensor_core.variation import homogeneous_norm

logger = get_logger(__name__)

LIL_HEADER = "N,norm,ratio_sqrtloglog,ratio_loglog"


def ito_area_residual(sample: GridRoughSample) -> float:
    """
    RMS of the simulated cell area against the exact 1-d Ito identity.

    For d = 1 the Ito area of a cell is (dW^2 - Sigma h) / 2, so the
    residual isolates the substep discretisation error.
    """
    if sample.params.dim != 1:
        raise DimensionMismatchError("the closed-form Ito area check is one-dimensional")
    path = sample.path
    u = path.level1[:, 0]
    area = path.level2[:, 0, 0] - sample.params.gamma[0, 0] * sample.mesh
    exact = 0.5 * (u ** 2 - sample.params.sigma[0, 0] * sample.mesh)
    return float(np.sqrt(np.mean((area - exact) ** 2)))


@dataclass(frozen=True)
class LilRow:
    N: int
    norm: float
    ratio_sqrtloglog: float
    ratio_loglog: float


@dataclass(frozen=True)
class LilTable:
    """Homogeneous norms of W_N on [0, 1] from one universal sample."""

    p: float
    rows: List[LilRow]

    @property
    def ratios(self) -> np.ndarray:
        return np.array([row.ratio_sqrtloglog for row in self.rows])

    def max_over_median(self) -> float:
        ratios = self.ratios
        return float(ratios.max() / np.median(ratios))

    def to_array(self) -> np.ndarray:
        return np.array([[r.N, r.norm, r.ratio_sqrtloglog, r.ratio_loglog] for r in self.rows])

    def write_csv(self, file_path: Union[str, Path]) -> Path:
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(file_path, self.to_array(), fmt=FLOAT_FORMAT, delimiter=",", header=LIL_HEADER, comments="")
        return file_path


def lil_diagnostic(
    params: BrownianRoughPathParams,
    p: float,
    N_list: Sequence[int],
    seed: int,
    cells_per_unit: int = 256,
    substeps: int = 4,
) -> LilTable:
    """
    |||W_N|||_{p,[0,1]} for every N, all from a single universal W.

    The universal sample lives on [0, max N] with mesh min N / cells_per_unit;
    each W_N is rescaled from it and merged by Chen products to
    ``cells_per_unit`` cells before taking the norm. Ratios against both
    sqrt(log log N) and log log N are reported.
    """
    Ns = [int(N) for N in N_list]
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise InvalidParameterError(f"N_list must be strictly increasing, got {list(N_list)}")
    if Ns[0] < 16:
        raise InvalidParameterError(f"every N must be >= 16, got {Ns[0]}")
    universal = sample_universal(params, Ns[-1], cells_per_unit, Ns[0], substeps, seed)
    rows = []
    for N in Ns:
        scaled = coarsen_to(rescale(universal, N, horizon=1.0), cells_per_unit)
        norm = homogeneous_norm(scaled.path, p)
        loglog = math.log(math.log(N))
        rows.append(LilRow(N, norm, norm / math.sqrt(loglog), norm / loglog))
        logger.debug("N=%d norm=%.6g", N, norm)
    return LilTable(p=float(p), rows=rows)
