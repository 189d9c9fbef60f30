"""
Empirical local Lipschitz probe of the driver-to-solution map.

For each driver pair the probe records the inhomogeneous rough distance of
the drivers, the sup distance of the Davie solutions, and the homogeneous
size ell of the larger driver. Ratios are grouped by ceil(ell).
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from roughflow.errors import GridMismatchError
from roughflow.log import get_logger
from roughflow.rde.fields import FieldSpec
from roughflow.rde.solver import RDEProblem, identity_clock, solve_rde
from roughflow.tensor_core.path import CadlagRoughPath
from roughflow.tensor_core.variation import homogeneous_norm, rough_distance

logger = get_logger(__name__)


@dataclass(frozen=True)
class ProbeRow:
    ell: float
    input_distance: float
    output_distance: float

    @property
    def ratio(self) -> float:
        if self.input_distance > 0:
            return self.output_distance / self.input_distance
        return 0.0 if self.output_distance == 0 else math.inf

    @property
    def bucket(self) -> int:
        return max(1, int(math.ceil(self.ell)))


@dataclass(frozen=True)
class ProbeTable:
    p: float
    rows: List[ProbeRow]

    def max_ratio_by_bucket(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for row in self.rows:
            out[row.bucket] = max(out.get(row.bucket, 0.0), row.ratio)
        return dict(sorted(out.items()))

    def to_array(self) -> np.ndarray:
        return np.array([[r.ell, r.input_distance, r.output_distance, r.ratio] for r in self.rows])


def lipschitz_probe(
    fields: FieldSpec,
    pairs: Iterable[Tuple[CadlagRoughPath, CadlagRoughPath]],
    p: float,
    y0: Sequence[float],
    clock=identity_clock,
) -> ProbeTable:
    """
    Tabulate (ell, input distance, output distance) over driver pairs.

    Args:
        fields: Vector fields
        pairs: Drivers sharing one grid per pair
        p: Variation exponent in (2, 3)
        y0: Common initial state
        clock: Drift clock for both solves
    """
    rows = []
    for x, y in pairs:
        if not np.array_equal(x.grid, y.grid):
            raise GridMismatchError("probe drivers must share their grid")
        ell = max(homogeneous_norm(x, p), homogeneous_norm(y, p))
        dist_in = rough_distance(x, y, p)
        sol_x = solve_rde(RDEProblem(fields, y0, x, clock))
        sol_y = solve_rde(RDEProblem(fields, y0, y, clock))
        rows.append(ProbeRow(ell, dist_in, sol_x.sup_distance(sol_y)))
    table = ProbeTable(p=float(p), rows=rows)
    logger.debug("lipschitz probe: %s", table.max_ratio_by_bucket())
    return table


def dilation_pairs(path: CadlagRoughPath, lambdas: Sequence[float]) -> List[Tuple[CadlagRoughPath, CadlagRoughPath]]:
    """(X, dilate(X, lam)) for every lam."""
    return [(path, path.dilate(lam)) for lam in lambdas]
