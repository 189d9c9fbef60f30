"""Averaging experiments and the ``roughflow`` command line."""

from roughflow.avg_cli.comparison import ComparisonEngine
from roughflow.avg_cli.config import KINDS, ExperimentConfig, load_config
from roughflow.avg_cli.experiments import (
    ExperimentResult,
    run_diffusion_continuous,
    run_diffusion_discrete,
    run_em_rate,
    run_experiment,
    run_invariance,
    run_lil,
    run_lil_constant,
    running_contraction,
)
from roughflow.avg_cli.models import CheckResult, ExperimentReport
from roughflow.avg_cli.output import write_outputs
from roughflow.avg_cli.rates import RateFit, fit_rate

__all__ = [
    "KINDS",
    "CheckResult",
    "ComparisonEngine",
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentResult",
    "RateFit",
    "fit_rate",
    "load_config",
    "run_diffusion_continuous",
    "run_diffusion_discrete",
    "run_em_rate",
    "run_experiment",
    "run_invariance",
    "run_lil",
    "run_lil_constant",
    "running_contraction",
    "write_outputs",
]
