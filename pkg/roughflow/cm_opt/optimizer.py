"""
Suprema of tensor contractions over the Cameron-Martin unit ball.

    M = sup { <A, level-ell signature of H> : ||H||_CM <= 1 }

H is piecewise linear with m segments. The search runs in whitened
coordinates z with h_k = Sigma^{1/2} z_k, where the constraint becomes
sum_k |z_k|^2 / m <= 1 and projection is radial scaling. Each restart starts
from a uniform direction on the sphere and climbs by normalised gradient
steps with step halving on failure; the best restart wins, ties going to
the lowest index.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from roughflow.cm_opt.cameron_martin import (
    CMPath,
    cm_norm,
    pl_signature,
    signature_gradient,
    signature_gradient_fd,
    sigma_root,
)
from roughflow.errors import DimensionMismatchError, InvalidParameterError
from roughflow.log import get_logger
from roughflow.parallel import map_indexed
from roughflow.rng import STREAM_RESTART, generator

logger = get_logger(__name__)

MAX_LEVEL = 5


class LilConfig(BaseModel):
    """Optimizer settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    m: int = Field(16, ge=1)
    restarts: int = Field(32, ge=1)
    max_iter: int = Field(2000, ge=1)
    step: float = Field(0.5, gt=0)
    tol: float = Field(1e-10, gt=0)
    gradient: str = "analytic"
    seed: int = Field(0, ge=0)

    @field_validator("gradient")
    @classmethod
    def _known_gradient(cls, value: str) -> str:
        if value not in ("analytic", "fd"):
            raise ValueError(f"gradient must be 'analytic' or 'fd', got {value!r}")
        return value


@dataclass(frozen=True, eq=False)
class ContractionTensor:
    """Coefficients A of shape (d,) * ell."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim < 1 or len(set(A.shape)) != 1:
            raise DimensionMismatchError(f"A must have shape (d,) * ell, got {A.shape}")
        if A.ndim > MAX_LEVEL:
            raise InvalidParameterError(f"levels above {MAX_LEVEL} are not supported, got {A.ndim}")
        if not np.all(np.isfinite(A)):
            raise InvalidParameterError("A has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def level(self) -> int:
        return self.A.ndim

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @classmethod
    def coordinate(cls, indices: Sequence[int], dim: int) -> "ContractionTensor":
        """A = e_{i_1} (x) ... (x) e_{i_ell}, zero-based indices."""
        A = np.zeros((dim,) * len(indices))
        A[tuple(indices)] = 1.0
        return cls(A)

    def scaled(self, factor: float) -> "ContractionTensor":
        return ContractionTensor(factor * self.A)

    def value(self, path: CMPath) -> float:
        return pl_signature(path, self.level).contract(self.A)


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    value: float
    h: np.ndarray
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class LilResult:
    """
    Attributes:
        M: Best value over restarts
        argmax: Maximising path
        restarts_used: Number of restarts run
        trace: Final value of each restart, in restart order
        converged: Whether the winning restart met the step tolerance
    """

    M: float
    argmax: CMPath
    restarts_used: int
    trace: List[float] = field(default_factory=list)
    converged: bool = True
    iterations: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "argmax_h": self.argmax.h.tolist(),
            "restarts": self.restarts_used,
            "converged": self.converged,
        }


class _Objective:
    def __init__(self, tensor: ContractionTensor, root: np.ndarray, gradient: str):
        self.tensor = tensor
        self.root = root
        self.gradient = gradient

    def path(self, z: np.ndarray) -> CMPath:
        return CMPath(z @ self.root)

    def value(self, z: np.ndarray) -> float:
        return self.tensor.value(self.path(z))

    def grad(self, z: np.ndarray) -> np.ndarray:
        path = self.path(z)
        if self.gradient == "fd":
            g = signature_gradient_fd(path, self.tensor.A)
        else:
            g = signature_gradient(path, self.tensor.A)
        return g @ self.root


def _size(z: np.ndarray) -> float:
    return float(np.sqrt(np.sum(z * z) / z.shape[0]))


def _project(z: np.ndarray) -> np.ndarray:
    size = _size(z)
    return z / size if size > 1.0 else z


def _climb(objective: _Objective, z: np.ndarray, config: LilConfig, index: int) -> RestartOutcome:
    f = objective.value(z)
    step = config.step
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iter + 1):
        g = objective.grad(z)
        gnorm = _size(g)
        if gnorm == 0.0:
            converged = True
            break
        gain = 0.0
        while step >= config.tol:
            trial = _project(z + step * g / gnorm)
            f_trial = objective.value(trial)
            if f_trial > f:
                gain = f_trial - f
                z, f = trial, f_trial
                step = min(2.0 * step, config.step)
                break
            step *= 0.5
        if gain <= config.tol * max(1.0, abs(f)):
            converged = True
            break
    size = _size(z)
    if f > 0.0 and 0.0 < size < 1.0:
        # the objective is ell-homogeneous, so positive values grow on the sphere
        z = z / size
        f = objective.value(z)
    return RestartOutcome(index, f, objective.path(z).h, iterations, converged)


def lil_constant(
    tensor: ContractionTensor,
    sigma,
    config: Optional[LilConfig] = None,
    threads: Optional[int] = None,
) -> LilResult:
    """
    Maximise <A, level-ell signature> over the Cameron-Martin unit ball of Sigma.

    Args:
        tensor: Contraction coefficients
        sigma: d x d covariance, positive semidefinite
        config: Optimizer settings
        threads: Worker threads for the restarts

    Returns:
        LilResult; ``converged`` is False when the winner hit ``max_iter``
    """
    config = config or LilConfig()
    root, _ = sigma_root(sigma)
    d = tensor.dim
    if root.shape[0] != d:
        raise DimensionMismatchError(f"Sigma is {root.shape[0]}-dimensional, A is {d}-dimensional")
    objective = _Objective(tensor, root, config.gradient)
    span = root @ np.linalg.pinv(root)

    def restart(index: int) -> RestartOutcome:
        z = generator(config.seed, STREAM_RESTART, index).standard_normal((config.m, d)) @ span
        size = _size(z)
        if size == 0.0:
            return RestartOutcome(index, 0.0, np.zeros((config.m, d)), 0, True)
        return _climb(objective, z / size, config, index)

    outcomes = map_indexed(restart, config.restarts, threads)
    best = outcomes[0]
    for outcome in outcomes[1:]:
        if outcome.value > best.value:
            best = outcome
    if best.value < 0.0:
        best = RestartOutcome(best.index, 0.0, np.zeros((config.m, d)), best.iterations, True)
    if not best.converged:
        logger.warning("restart %d stopped after %d iterations without meeting the step tolerance",
                       best.index, best.iterations)
    return LilResult(
        M=float(best.value),
        argmax=CMPath(best.h),
        restarts_used=len(outcomes),
        trace=[float(o.value) for o in outcomes],
        converged=best.converged,
        iterations=[o.iterations for o in outcomes],
    )


def coordinate_constant(indices: Sequence[int], sigma, config: Optional[LilConfig] = None,
                        threads: Optional[int] = None) -> float:
    """d_{i_1..i_ell}: the supremum for A = e_{i_1..i_ell}."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    tensor = ContractionTensor.coordinate(indices, sigma.shape[0])
    return lil_constant(tensor, sigma, config, threads).M


def quadratic_form_bound(A, sigma) -> float:
    """
    sup over straight lines of <A, H(1) (x) H(1) / 2>, ell = 2.

    Equals half the top eigenvalue of Sigma^{1/2} Sym(A) Sigma^{1/2}, floored
    at zero. Straight lines are feasible, so this never exceeds M.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    root, _ = sigma_root(sigma)
    if A.shape != root.shape:
        raise DimensionMismatchError(f"A must have shape {root.shape}, got {A.shape}")
    sym = 0.5 * (A + A.T)
    top = float(np.linalg.eigvalsh(root @ sym @ root).max())
    return max(0.0, 0.5 * top)


def feasible(path: CMPath, sigma, slack: float = 1e-9) -> bool:
    return cm_norm(path, sigma) <= 1.0 + slack
