"""Cameron-Martin paths, their signatures and LIL constants of tensor contractions."""

from roughflow.cm_opt.cameron_martin import (
    CMPath,
    cm_norm,
    concatenate,
    pl_signature,
    signature_gradient,
    signature_gradient_fd,
    sigma_root,
)
from roughflow.cm_opt.optimizer import (
    ContractionTensor,
    LilConfig,
    LilResult,
    coordinate_constant,
    feasible,
    lil_constant,
    quadratic_form_bound,
)

__all__ = [
    "CMPath",
    "ContractionTensor",
    "LilConfig",
    "LilResult",
    "cm_norm",
    "concatenate",
    "coordinate_constant",
    "feasible",
    "lil_constant",
    "pl_signature",
    "quadratic_form_bound",
    "sigma_root",
    "signature_gradient",
    "signature_gradient_fd",
]
