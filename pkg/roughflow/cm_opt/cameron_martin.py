"""
Piecewise-linear Cameron-Martin paths and their signatures.

A ``CMPath`` is H: [0, 1] -> R^d with H(0) = 0 and constant derivative h_k
on [k/m, (k+1)/m). Its signature truncated at level ell is the product of
the segment exponentials exp(h_k / m), which equals the iterated integrals
of H exactly.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from roughflow.errors import DimensionMismatchError, InvalidParameterError
from roughflow.tensor_core.tensor import TruncatedTensor

RANGE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CMPath:
    """Constant derivatives ``h`` of shape (m, d) on m equal subintervals."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim == 1:
            h = h.reshape(-1, 1)
        if h.ndim != 2 or h.shape[0] < 1:
            raise DimensionMismatchError(f"h must have shape (m, d), got {h.shape}")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def dim(self) -> int:
        return self.h.shape[1]

    @property
    def displacements(self) -> np.ndarray:
        return self.h / self.m

    def endpoint(self) -> np.ndarray:
        return self.displacements.sum(axis=0)

    @classmethod
    def straight(cls, a, m: int = 1) -> "CMPath":
        """H(t) = t a."""
        return cls(np.tile(np.atleast_1d(np.asarray(a, dtype=float)), (m, 1)))

    def to_dict(self) -> dict:
        return {"m": self.m, "h": self.h.tolist()}


def sigma_root(sigma) -> Tuple[np.ndarray, np.ndarray]:
    """(Sigma^{1/2}, its pseudo-inverse) from a symmetric eigendecomposition."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatchError(f"Sigma must be square, got shape {sigma.shape}")
    values, vectors = np.linalg.eigh(0.5 * (sigma + sigma.T))
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    if values.min(initial=0.0) < -RANGE_TOL * scale:
        raise InvalidParameterError(f"Sigma is not positive semidefinite (eigenvalue {values.min():.3g})")
    keep = values > RANGE_TOL * scale
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T
    inv = (vectors[:, keep] / np.sqrt(values[keep])) @ vectors[:, keep].T
    return root, inv


def cm_norm(path: CMPath, sigma) -> float:
    """
    (sum_k |Sigma^{-1/2} h_k|^2 / m)^{1/2}, or +inf when some h_k leaves range(Sigma).
    """
    root, inv = sigma_root(sigma)
    if root.shape[0] != path.dim:
        raise DimensionMismatchError(f"Sigma is {root.shape[0]}-dimensional, path is {path.dim}-dimensional")
    z = path.h @ inv
    back = z @ root
    if np.max(np.abs(back - path.h), initial=0.0) > RANGE_TOL * max(1.0, float(np.abs(path.h).max())):
        return float("inf")
    return float(np.sqrt(np.sum(z * z) / path.m))


def pl_signature(path: CMPath, depth: int) -> TruncatedTensor:
    """Signature of H truncated at ``depth``: the ordered product of exp(h_k / m)."""
    if int(depth) != depth or depth < 1:
        raise InvalidParameterError(f"depth must be an integer >= 1, got {depth}")
    out = TruncatedTensor.identity(path.dim, int(depth))
    for v in path.displacements:
        out = out * TruncatedTensor.exp(v, int(depth))
    return out


def concatenate(first: CMPath, second: CMPath) -> CMPath:
    """
    Run ``first`` then ``second`` on [0, 1], each over its share of segments.

    Derivatives are rescaled so every segment keeps its displacement, which
    makes the signature of the result the tensor product of the two.
    """
    if first.dim != second.dim:
        raise DimensionMismatchError(f"cannot join paths of dimension {first.dim} and {second.dim}")
    total = first.m + second.m
    return CMPath(np.vstack([first.h * total / first.m, second.h * total / second.m]))


def _all_levels(t: TruncatedTensor) -> List[np.ndarray]:
    return [t.level(k) for k in range(t.depth + 1)]


def _contract_except(B: np.ndarray, v: np.ndarray, keep: int) -> np.ndarray:
    """Contract every slot of B with v except slot ``keep``."""
    out = np.moveaxis(B, keep, 0)
    while out.ndim > 1:
        out = out @ v
    return out


def _exp_gradient(B: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Gradient in v of <B, v^{(x)b}> / b! for a tensor B of order b >= 1."""
    b = B.ndim
    grad = sum(_contract_except(B, v, pos) for pos in range(b))
    return grad / math.factorial(b)


def signature_gradient(path: CMPath, A: np.ndarray) -> np.ndarray:
    """
    Analytic gradient of <A, level-ell signature> with respect to h.

    Segment k enters through P_k exp(v_k) S_k with prefix P_k and suffix S_k;
    the pairing splits over the levels a + b + c = ell of the three factors.
    """
    A = np.asarray(A, dtype=float)
    ell, d, m = A.ndim, path.dim, path.m
    if A.shape != (d,) * ell:
        raise DimensionMismatchError(f"A must have shape {(d,) * ell}, got {A.shape}")
    v = path.displacements
    exps = [TruncatedTensor.exp(vk, ell) for vk in v]
    prefixes = [TruncatedTensor.identity(d, ell)]
    for e in exps[:-1]:
        prefixes.append(prefixes[-1] * e)
    suffixes = [TruncatedTensor.identity(d, ell)]
    for e in reversed(exps[1:]):
        suffixes.append(e * suffixes[-1])
    suffixes.reverse()

    grad = np.zeros((m, d))
    for k in range(m):
        P, S = _all_levels(prefixes[k]), _all_levels(suffixes[k])
        for b in range(1, ell + 1):
            B = np.zeros((d,) * b)
            for a in range(ell - b + 1):
                c = ell - b - a
                B = B + np.tensordot(np.tensordot(P[a], A, axes=a), S[c], axes=c)
            grad[k] += _exp_gradient(B, v[k])
    return grad / m


def signature_gradient_fd(path: CMPath, A: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of <A, level-ell signature>."""
    A = np.asarray(A, dtype=float)
    ell = A.ndim
    grad = np.zeros_like(path.h)
    for index in np.ndindex(path.h.shape):
        up, down = path.h.copy(), path.h.copy()
        up[index] += step
        down[index] -= step
        f_up = pl_signature(CMPath(up), ell).contract(A)
        f_down = pl_signature(CMPath(down), ell).contract(A)
        grad[index] = (f_up - f_down) / (2.0 * step)
    return grad
