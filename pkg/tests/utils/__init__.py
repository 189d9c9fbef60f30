"""Test utilities: ground truth comparison and independent oracles."""

from .comparison import ComparisonEngine, within_se
from .oracles import brute_force_phi, lagged_covariance_mc, markov_recurrence, ordered_iterated_sum

__all__ = [
    'ComparisonEngine',
    'within_se',
    'brute_force_phi',
    'lagged_covariance_mc',
    'markov_recurrence',
    'ordered_iterated_sum',
]
