"""
Level-2 group elements.

A ``Level2GroupElement`` is a pair (a, M) in R^d + R^{d x d} with the
multiplication (a, M) * (b, N) = (a + b, M + a (x) b + N). Chen's relation
for rough paths is exactly this product applied to adjacent spans.
"""

from dataclasses import dataclass

import numpy as np

from roughflow import settings
from roughflow.errors import DimensionMismatchError, InvalidParameterError


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Level2GroupElement:
    """
    First and second level increment of a rough path over one span.

    Attributes:
        a: First level, shape (d,)
        m: Second level, shape (d, d); ``m[i, j]`` pairs coordinate i
           before coordinate j
    """

    a: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        a = _frozen(np.atleast_1d(self.a))
        m = _frozen(np.atleast_2d(self.m))
        if a.ndim != 1 or m.shape != (a.shape[0], a.shape[0]):
            raise DimensionMismatchError(
                f"level-2 element needs a of shape (d,) and m of shape (d, d), "
                f"got {a.shape} and {m.shape}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "Level2GroupElement":
        return cls(np.zeros(dim), np.zeros((dim, dim)))

    def __mul__(self, other: "Level2GroupElement") -> "Level2GroupElement":
        return star_mul(self, other)

    def inverse(self) -> "Level2GroupElement":
        return star_inv(self)

    def dilate(self, lam: float) -> "Level2GroupElement":
        lam = check_dilation(lam)
        return Level2GroupElement(lam * self.a, lam * lam * self.m)

    def norm(self) -> float:
        """Homogeneous size |a| + |M|^{1/2} (Euclidean and Frobenius)."""
        return float(np.linalg.norm(self.a) + np.sqrt(np.linalg.norm(self.m)))

    def allclose(self, other: "Level2GroupElement", atol: float = None) -> bool:
        tol = settings.TOLERANCE if atol is None else atol
        return (
            self.dim == other.dim
            and np.allclose(self.a, other.a, rtol=0.0, atol=tol)
            and np.allclose(self.m, other.m, rtol=0.0, atol=tol)
        )


def check_dilation(lam: float) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise InvalidParameterError(f"dilation factor must be a finite nonnegative real, got {lam}")
    return lam


def star_mul(x: Level2GroupElement, y: Level2GroupElement) -> Level2GroupElement:
    """Group product (a+b, M + a(x)b + N)."""
    if x.dim != y.dim:
        raise DimensionMismatchError(f"cannot multiply level-2 elements of dimension {x.dim} and {y.dim}")
    return Level2GroupElement(x.a + y.a, x.m + np.outer(x.a, y.a) + y.m)


def star_inv(x: Level2GroupElement) -> Level2GroupElement:
    """Group inverse (-a, -M + a(x)a)."""
    return Level2GroupElement(-x.a, -x.m + np.outer(x.a, x.a))
