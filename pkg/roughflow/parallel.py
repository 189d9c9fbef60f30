"""
Deterministic replica pool.

Replicas are cut into fixed-size blocks. Blocks run on a thread pool and
their results are concatenated in block order, so outputs do not depend on
the worker count. numpy releases the GIL inside its kernels, which is where
the time goes.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from roughflow import settings
from roughflow.log import get_logger

logger = get_logger(__name__)

T = TypeVar("T")


def replica_blocks(replicas: int, block_size: Optional[int] = None) -> List[Tuple[int, int]]:
    """Split ``range(replicas)`` into half-open ``(start, stop)`` blocks."""
    size = int(block_size or settings.BLOCK_SIZE)
    if size < 1:
        raise ValueError(f"block size must be positive, got {size}")
    return [(start, min(start + size, replicas)) for start in range(0, replicas, size)]


def map_blocks(
    func: Callable[[int, int], T],
    replicas: int,
    threads: Optional[int] = None,
    block_size: Optional[int] = None,
) -> List[T]:
    """
    Evaluate ``func(start, stop)`` for every replica block.

    Args:
        func: Pure function of a replica range
        replicas: Total replica count
        threads: Worker threads (defaults to ``ROUGHFLOW_THREADS``)
        block_size: Replicas per block (defaults to ``ROUGHFLOW_BLOCK_SIZE``)

    Returns:
        Per-block results in block order
    """
    blocks = replica_blocks(replicas, block_size)
    workers = max(1, int(threads or settings.THREADS))
    logger.debug("running %d replicas in %d blocks on %d threads", replicas, len(blocks), workers)
    if workers == 1 or len(blocks) <= 1:
        return [func(start, stop) for start, stop in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, start, stop) for start, stop in blocks]
        return [future.result() for future in futures]


def map_indexed(func: Callable[[int], T], count: int, threads: Optional[int] = None) -> List[T]:
    """Evaluate ``func(i)`` for ``i < count``; results come back in index order."""
    workers = max(1, int(threads or settings.THREADS))
    if workers == 1 or count <= 1:
        return [func(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, range(count)))


def concat_blocks(parts: Sequence[np.ndarray]) -> np.ndarray:
    """Stack per-block arrays along the replica axis."""
    if not parts:
        return np.empty((0,))
    return np.concatenate(list(parts), axis=0)
