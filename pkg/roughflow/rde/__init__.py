"""Davie-scheme RDE solver, the limiting Ito diffusion and the Lipschitz probe."""

from roughflow.rde.fields import (
    FIELD_FAMILIES,
    FieldSpec,
    build_field,
    check_derivative,
    constant,
    geometric,
    identity,
    linear,
    random_trigonometric,
    sine_scalar,
    trigonometric,
)
from roughflow.rde.probe import ProbeRow, ProbeTable, dilation_pairs, lipschitz_probe
from roughflow.rde.sde import (
    corrected_drift,
    drift_correction,
    euler_maruyama,
    geometric_solution,
    ito_sde_solve,
    stratonovich_geometric_solution,
)
from roughflow.rde.solver import (
    RDEProblem,
    SolutionPath,
    davie_step,
    identity_clock,
    recurrence_solve,
    solve_rde,
    solve_rde_batch,
    step_clock,
)

__all__ = [
    "FIELD_FAMILIES",
    "FieldSpec",
    "ProbeRow",
    "ProbeTable",
    "RDEProblem",
    "SolutionPath",
    "build_field",
    "check_derivative",
    "constant",
    "corrected_drift",
    "davie_step",
    "dilation_pairs",
    "drift_correction",
    "euler_maruyama",
    "geometric",
    "geometric_solution",
    "identity",
    "identity_clock",
    "ito_sde_solve",
    "linear",
    "lipschitz_probe",
    "random_trigonometric",
    "recurrence_solve",
    "sine_scalar",
    "solve_rde",
    "solve_rde_batch",
    "step_clock",
    "stratonovich_geometric_solution",
    "trigonometric",
]
