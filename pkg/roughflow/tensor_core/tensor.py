"""
Truncated tensor series and Lyons extensions.

A ``TruncatedTensor`` of depth L over R^d holds levels 1..L; level k has
shape (d,) * k and the level-0 coefficient is fixed to 1, so every element
is group-like and invertible in the truncated algebra.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from roughflow.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError
from roughflow.tensor_core.path import CadlagRoughPath


@dataclass(frozen=True, eq=False)
class TruncatedTensor:
    """Levels 1..depth of a tensor series with unit constant term."""

    levels: Tuple[np.ndarray, ...]

    def __post_init__(self):
        levels = tuple(np.array(level, dtype=float) for level in self.levels)
        if not levels:
            raise InvalidParameterError("a truncated tensor needs depth >= 1")
        d = levels[0].shape[0] if levels[0].ndim == 1 else -1
        for k, level in enumerate(levels, start=1):
            if level.shape != (d,) * k:
                raise DimensionMismatchError(
                    f"level {k} must have shape {(d,) * k}, got {level.shape}"
                )
            level.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def dim(self) -> int:
        return self.levels[0].shape[0]

    def level(self, k: int) -> np.ndarray:
        """Level k, with level 0 returned as the scalar array 1."""
        if k == 0:
            return np.ones(())
        return self.levels[k - 1]

    @classmethod
    def identity(cls, dim: int, depth: int) -> "TruncatedTensor":
        return cls(tuple(np.zeros((dim,) * k) for k in range(1, depth + 1)))

    @classmethod
    def exp(cls, v: np.ndarray, depth: int) -> "TruncatedTensor":
        """Tensor exponential: level k is v^{(x)k} / k!."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if depth < 1:
            raise InvalidParameterError(f"depth must be >= 1, got {depth}")
        levels, power = [], np.ones(())
        for k in range(1, depth + 1):
            power = np.multiply.outer(power, v)
            levels.append(power / math.factorial(k))
        return cls(tuple(levels))

    def __mul__(self, other: "TruncatedTensor") -> "TruncatedTensor":
        return tensor_mul(self, other)

    def inverse(self) -> "TruncatedTensor":
        """Inverse in the truncated algebra: z_k = -sum_{i=1..k} x_i (x) z_{k-i}."""
        inv = [np.ones(())]
        for k in range(1, self.depth + 1):
            acc = np.zeros((self.dim,) * k)
            for i in range(1, k + 1):
                acc -= np.multiply.outer(self.level(i), inv[k - i])
            inv.append(acc)
        return TruncatedTensor(tuple(inv[1:]))

    def contract(self, coefficients: np.ndarray) -> float:
        """Pairing <A, level_k> for a tensor A of shape (d,) * k."""
        a = np.asarray(coefficients, dtype=float)
        k = a.ndim
        if k < 1 or k > self.depth or a.shape != (self.dim,) * k:
            raise DimensionMismatchError(
                f"cannot contract tensor of shape {a.shape} with depth {self.depth}, dim {self.dim}"
            )
        return float(np.sum(a * self.level(k)))

    def allclose(self, other: "TruncatedTensor", atol: float = 1e-12) -> bool:
        return (self.depth == other.depth and self.dim == other.dim
                and all(np.allclose(a, b, rtol=0.0, atol=atol)
                        for a, b in zip(self.levels, other.levels)))


def tensor_mul(x: TruncatedTensor, y: TruncatedTensor) -> TruncatedTensor:
    """Truncated product: level k = sum_{i+j=k} x_i (x) y_j."""
    if x.depth != y.depth or x.dim != y.dim:
        raise DimensionMismatchError(
            f"tensor_mul needs equal depth and dimension, got ({x.depth}, {x.dim}) and ({y.depth}, {y.dim})"
        )
    out = []
    for k in range(1, x.depth + 1):
        acc = x.level(k) + y.level(k)
        for i in range(1, k):
            acc = acc + np.multiply.outer(x.level(i), y.level(k - i))
        out.append(acc)
    return TruncatedTensor(tuple(out))


class LyonsExtension:
    """
    Lyons extension of a canonical lift up to a fixed depth.

    Over a span of cells the extension is the ordered product of the
    one-jump elements (1, u, 0, ..., 0), so level k is the strictly ordered
    k-fold iterated sum of the cell increments.
    """

    def __init__(self, path: CadlagRoughPath, depth: int):
        self.path = path
        self.depth = depth

    def span(self, i: int, j: int) -> TruncatedTensor:
        """Extension over grid indices [i, j]."""
        if not (0 <= i <= j <= self.path.cells):
            raise GridMismatchError(f"span ({i}, {j}) outside grid of {self.path.cells} cells")
        d = self.path.dim
        levels: List[np.ndarray] = [np.ones(())] + [np.zeros((d,) * k) for k in range(1, self.depth + 1)]
        for u in self.path.level1[i:j]:
            for k in range(self.depth, 0, -1):
                levels[k] = levels[k] + np.multiply.outer(levels[k - 1], u)
        return TruncatedTensor(tuple(levels[1:]))

    def span_times(self, s: float, t: float) -> TruncatedTensor:
        return self.span(self.path.index_of(s), self.path.index_of(t))

    def full(self) -> TruncatedTensor:
        return self.span(0, self.path.cells)


def lyons_extend(path: CadlagRoughPath, depth: int) -> LyonsExtension:
    """
    Extend a canonical lift to all levels up to ``depth``.

    Raises if the path carries within-cell second levels, since then the
    higher levels are not determined by the cell jumps alone.
    """
    if int(depth) != depth or depth < 1:
        raise InvalidParameterError(f"depth must be an integer >= 1, got {depth}")
    if not path.is_canonical():
        raise InvalidParameterError("lyons_extend needs a canonical lift with zero within-cell second level")
    return LyonsExtension(path, int(depth))


def iterated_sums(xi: Sequence, depth: int) -> TruncatedTensor:
    """Unscaled ordered iterated sums of a sequence up to ``depth``."""
    values = np.asarray(xi, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    path = CadlagRoughPath(np.arange(values.shape[0] + 1, dtype=float), values,
                           np.zeros((values.shape[0], values.shape[1], values.shape[1])))
    return lyons_extend(path, depth).full()
