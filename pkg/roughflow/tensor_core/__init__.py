"""Level-2 rough path algebra, p-variation geometry and Lyons extensions."""

from roughflow.tensor_core.group import Level2GroupElement, star_inv, star_mul
from roughflow.tensor_core.io import read_path_csv, write_path_csv, write_solution_csv
from roughflow.tensor_core.path import (
    CadlagRoughPath,
    canonical_lift,
    dilate,
    symmetric_defect,
    zero_path,
)
from roughflow.tensor_core.tensor import (
    LyonsExtension,
    TruncatedTensor,
    iterated_sums,
    lyons_extend,
    tensor_mul,
)
from roughflow.tensor_core.variation import (
    VariationReport,
    homogeneous_norm,
    p_variation,
    p_variation_bruteforce,
    rough_distance,
)

__all__ = [
    "CadlagRoughPath",
    "Level2GroupElement",
    "LyonsExtension",
    "TruncatedTensor",
    "VariationReport",
    "canonical_lift",
    "dilate",
    "homogeneous_norm",
    "iterated_sums",
    "lyons_extend",
    "p_variation",
    "p_variation_bruteforce",
    "read_path_csv",
    "rough_distance",
    "star_inv",
    "star_mul",
    "symmetric_defect",
    "tensor_mul",
    "write_path_csv",
    "write_solution_csv",
    "zero_path",
]
