"""
Sampling of stationary Markov sequences.

Each replica draws its uniforms from its own counter-based stream, and
states follow by inverse-CDF lookup in the cumulative transition rows. The
uniform array is the same whether one replica or a whole block is sampled,
so a replica is bit-identical either way.
"""

import numpy as np

from roughflow.mixing_gen.spec import MarkovMixingSpec, check_stochastic
from roughflow.rng import STREAM_CHAIN, generator


def cumulative_rows(P: np.ndarray) -> np.ndarray:
    """Row-wise CDFs with the last column pinned to 1."""
    cum = np.cumsum(np.asarray(P, dtype=float), axis=-1)
    cum[..., -1] = 1.0
    return np.minimum(cum, 1.0)


def replica_uniforms(seed: int, n: int, start: int, stop: int, stream: int = STREAM_CHAIN) -> np.ndarray:
    """Uniforms of shape (stop - start, n), one stream per replica."""
    out = np.empty((stop - start, n))
    for row, replica in enumerate(range(start, stop)):
        out[row] = generator(seed, stream, replica).random(n)
    return out


def _lookup(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Number of CDF entries <= u, i.e. the sampled state index."""
    return np.sum(cum <= u[..., None], axis=-1)


def sample_states(spec: MarkovMixingSpec, n: int, seed: int, start: int = 0, stop: int = 1,
                  stream: int = STREAM_CHAIN) -> np.ndarray:
    """
    Stationary state paths for replicas ``start..stop-1``.

    Returns:
        Integer array of shape (stop - start, n)
    """
    P = check_stochastic(spec.transition)
    replicas = stop - start
    states = np.zeros((replicas, n), dtype=np.int64)
    if n == 0:
        return states
    u = replica_uniforms(seed, n, start, stop, stream)
    start_cum = cumulative_rows(spec.stationary)
    states[:, 0] = _lookup(start_cum, u[:, 0])
    cum = cumulative_rows(P)
    if np.all(P == P[0]):
        # i.i.d. rows: every transition uses the same CDF.
        states[:, 1:] = _lookup(cum[0], u[:, 1:])
        return states
    for k in range(1, n):
        states[:, k] = _lookup(cum[states[:, k - 1]], u[:, k])
    return states


def sample_sequences(spec: MarkovMixingSpec, n: int, seed: int, start: int = 0, stop: int = 1) -> np.ndarray:
    """Observable sequences xi(0..n-1), shape (stop - start, n, d)."""
    return spec.observable[sample_states(spec, n, seed, start, stop)]


def sample_sequence(spec: MarkovMixingSpec, n: int, seed: int, replica: int = 0) -> np.ndarray:
    """One stationary sequence xi(0..n-1) of shape (n, d)."""
    return sample_sequences(spec, n, seed, replica, replica + 1)[0]
