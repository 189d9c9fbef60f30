"""Brownian rough paths, rescaling families, Euler-Maruyama lifts and LIL growth."""

from roughflow.brownian.diagnostics import LilRow, LilTable, ito_area_residual, lil_diagnostic
from roughflow.brownian.params import BrownianRoughPathParams, ito, limiting_parameters, stratonovich
from roughflow.brownian.sampling import (
    GridRoughSample,
    coarsen_to,
    em_lift,
    rescale,
    sample_brp,
    sample_universal,
)

__all__ = [
    "BrownianRoughPathParams",
    "GridRoughSample",
    "LilRow",
    "LilTable",
    "coarsen_to",
    "em_lift",
    "ito",
    "ito_area_residual",
    "lil_diagnostic",
    "limiting_parameters",
    "rescale",
    "sample_brp",
    "sample_universal",
    "stratonovich",
]
