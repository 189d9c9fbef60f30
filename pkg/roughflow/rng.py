"""
Counter-based random streams.

Every random draw in roughflow comes from a Philox generator keyed by
``(master_seed, stream, replica)``, so a replica's numbers never depend on
which worker produced them or on how many replicas run alongside it.
"""

from typing import Iterable, List

import numpy as np

# Stream identifiers, fixed per purpose.
STREAM_CHAIN = 0
STREAM_NOISE = 1
STREAM_BOOTSTRAP = 2
STREAM_RESTART = 3
STREAM_PROBE = 4
STREAM_LIMIT = 5

STREAM_NAMES = {
    STREAM_CHAIN: "chain",
    STREAM_NOISE: "noise",
    STREAM_BOOTSTRAP: "bootstrap",
    STREAM_RESTART: "restart",
    STREAM_PROBE: "probe",
    STREAM_LIMIT: "limit",
}

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    """Validate a u64 master seed."""
    seed = int(seed)
    if seed < 0 or seed > MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def generator(seed: int, stream: int = STREAM_CHAIN, replica: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, stream, replica) triple."""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=(int(stream), int(replica)))
    return np.random.Generator(np.random.Philox(sequence))


def generators(seed: int, stream: int, replicas: Iterable[int]) -> List[np.random.Generator]:
    """Generators for a set of replica indices, in the order given."""
    return [generator(seed, stream, r) for r in replicas]
