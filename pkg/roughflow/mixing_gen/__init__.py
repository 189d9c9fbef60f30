"""phi-mixing sequences from finite Markov chains and their suspension flows."""

from roughflow.mixing_gen.presets import (
    CHAIN_PRESETS,
    SUSPENSION_PRESETS,
    chain_preset,
    deterministic_swap,
    iid_rows,
    suspension_preset,
    two_state,
)
from roughflow.mixing_gen.sampling import sample_sequence, sample_sequences, sample_states
from roughflow.mixing_gen.spec import MarkovMixingSpec, SuspensionSpec, stationary_distribution
from roughflow.mixing_gen.statistics import (
    CovarianceSummary,
    MixingDiagnostics,
    closed_form_gamma,
    covariance_summary,
    lagged_covariance,
    mixing_condition_check,
    phi_coefficient,
    phi_sequence,
    spectral_gap,
    total_variation,
)
from roughflow.mixing_gen.suspension import (
    SuspensionBatch,
    SuspensionRecord,
    continuous_limit_covariance,
    eta_covariance_summary,
    eta_spec,
    eta_values,
    fiber_area,
    fiber_area_mean,
    roof_mean,
    suspension_batch,
    suspension_sample,
)

__all__ = [
    "CHAIN_PRESETS",
    "SUSPENSION_PRESETS",
    "CovarianceSummary",
    "MarkovMixingSpec",
    "MixingDiagnostics",
    "SuspensionBatch",
    "SuspensionRecord",
    "SuspensionSpec",
    "chain_preset",
    "closed_form_gamma",
    "continuous_limit_covariance",
    "covariance_summary",
    "deterministic_swap",
    "eta_covariance_summary",
    "eta_spec",
    "eta_values",
    "fiber_area",
    "fiber_area_mean",
    "iid_rows",
    "lagged_covariance",
    "mixing_condition_check",
    "phi_coefficient",
    "phi_sequence",
    "roof_mean",
    "sample_sequence",
    "sample_sequences",
    "sample_states",
    "spectral_gap",
    "stationary_distribution",
    "suspension_batch",
    "suspension_preset",
    "suspension_sample",
    "total_variation",
    "two_state",
]
