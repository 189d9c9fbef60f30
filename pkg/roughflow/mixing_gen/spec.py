"""
Pydantic models for finite-state mixing sources.

``MarkovMixingSpec`` describes a stationary chain with a vector observable
xi(n) = g(state_n). ``SuspensionSpec`` adds a roof function and a fiber
observable, giving the continuous-time suspension flow.

Validation errors carry the key path of the offending field.
"""

from functools import cached_property
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from roughflow.errors import (
    InexactFiberModeError,
    NonCenteredObservableError,
    NonStochasticMatrixError,
)

STOCHASTIC_TOL = 1e-12
EXACT_FIBER_MODES = ("constant", "polynomial")


def _to_list(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def check_stochastic(P: np.ndarray, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """Raise unless ``P`` is square with nonnegative rows summing to 1."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
        raise NonStochasticMatrixError(f"P must be a square matrix, got shape {P.shape}")
    if np.any(P < -tol):
        raise NonStochasticMatrixError(f"P has negative entries (min {P.min():.3g})")
    worst = float(np.max(np.abs(P.sum(axis=1) - 1.0)))
    if worst > tol:
        raise NonStochasticMatrixError(f"rows of P must sum to 1, worst deviation {worst:.3g}")
    return P


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 in the least-squares sense."""
    P = np.asarray(P, dtype=float)
    S = P.shape[0]
    A = np.vstack((P.T - np.eye(S), np.ones((1, S))))
    b = np.zeros(S + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(A, b, rcond=None)[0]
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


class MarkovMixingSpec(BaseModel):
    """
    Finite stationary Markov chain with observable rows g(state) in R^d.

    Attributes:
        states: Number of states S
        P: Row-stochastic S x S transition matrix
        g: S x d observable; a flat list is read as d = 1
        pi: Stationary law; solved from P when omitted
        centered: Assert that E_pi g = 0 (checked)
        auto_center: Subtract E_pi g when not asserted centered
        name: Optional label used in reports
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    states: int = Field(..., ge=1)
    P: List[List[float]]
    g: List[List[float]]
    pi: Optional[List[float]] = None
    centered: bool = False
    auto_center: bool = True
    name: Optional[str] = None

    @field_validator("P", "pi", mode="before")
    @classmethod
    def _arrays_to_lists(cls, value):
        return _to_list(value)

    @field_validator("g", mode="before")
    @classmethod
    def _column_observable(cls, value):
        value = _to_list(value)
        if isinstance(value, (list, tuple)) and value and not isinstance(value[0], (list, tuple)):
            return [[v] for v in value]
        return value

    @model_validator(mode="after")
    def _check_consistency(self):
        P = np.asarray(self.P, dtype=float)
        if P.shape != (self.states, self.states):
            raise ValueError(f"P must be {self.states} x {self.states}, got {P.shape}")
        check_stochastic(P)
        g = np.asarray(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != self.states or g.shape[1] < 1:
            raise ValueError(f"g must have {self.states} rows of equal width d >= 1, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("g has non-finite entries")
        if self.pi is not None:
            pi = np.asarray(self.pi, dtype=float)
            if pi.shape != (self.states,):
                raise ValueError(f"pi must have {self.states} entries, got {pi.shape}")
            drift = float(np.max(np.abs(pi @ P - pi)))
            if drift > STOCHASTIC_TOL or abs(pi.sum() - 1.0) > STOCHASTIC_TOL:
                raise ValueError(f"pi is not stationary for P (|pi P - pi| = {drift:.3g})")
        if self.centered:
            mean = self.stationary @ g
            if np.max(np.abs(mean)) > STOCHASTIC_TOL:
                raise NonCenteredObservableError(
                    f"observable declared centered but E_pi g = {mean.tolist()}"
                )
        return self

    @cached_property
    def transition(self) -> np.ndarray:
        P = np.asarray(self.P, dtype=float)
        P.setflags(write=False)
        return P

    @cached_property
    def stationary(self) -> np.ndarray:
        pi = (np.asarray(self.pi, dtype=float) if self.pi is not None
              else stationary_distribution(np.asarray(self.P, dtype=float)))
        pi.setflags(write=False)
        return pi

    @cached_property
    def raw_observable(self) -> np.ndarray:
        g = np.asarray(self.g, dtype=float)
        g.setflags(write=False)
        return g

    @cached_property
    def observable(self) -> np.ndarray:
        """g as sampled: centered when asserted or when ``auto_center`` is set."""
        g = self.raw_observable
        if not self.centered and self.auto_center:
            g = g - self.stationary @ g
        g = np.array(g)
        g.setflags(write=False)
        return g

    @property
    def dim(self) -> int:
        return self.raw_observable.shape[1]

    @property
    def is_centered(self) -> bool:
        return bool(np.max(np.abs(self.stationary @ self.observable)) <= STOCHASTIC_TOL)

    @property
    def label(self) -> str:
        return self.name or f"markov-{self.states}"


class SuspensionSpec(BaseModel):
    """
    Suspension flow over a Markov base with roof tau(state).

    Fiber observables are exactly integrable: ``constant`` uses g(state) on
    the whole fiber; ``polynomial`` uses per-state polynomials in the fiber
    height with ascending coefficients, shape S x d x K.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: MarkovMixingSpec
    tau: List[float]
    roof_bound: Optional[float] = Field(default=None, gt=0)
    fiber_mode: str = "constant"
    fiber_coefficients: Optional[List[List[List[float]]]] = None
    name: Optional[str] = None

    @field_validator("tau", "fiber_coefficients", mode="before")
    @classmethod
    def _arrays_to_lists(cls, value):
        return _to_list(value)

    @field_validator("fiber_mode")
    @classmethod
    def _exact_mode(cls, value: str) -> str:
        if value not in EXACT_FIBER_MODES:
            raise InexactFiberModeError(
                f"fiber mode {value!r} has no exact antiderivative; use one of {EXACT_FIBER_MODES}"
            )
        return value

    @model_validator(mode="after")
    def _check_roof(self):
        tau = np.asarray(self.tau, dtype=float)
        S = self.base.states
        if tau.shape != (S,):
            raise ValueError(f"tau must have {S} entries, got shape {tau.shape}")
        if np.any(tau <= 0) or not np.all(np.isfinite(tau)):
            raise ValueError("roof values must be finite and positive")
        bound = self.bound
        if np.any(tau < 1.0 / bound - 1e-15) or np.any(tau > bound + 1e-15):
            raise ValueError(f"roof values must lie in [1/L, L] with L = {bound}")
        if self.fiber_mode == "polynomial":
            if self.fiber_coefficients is None:
                raise ValueError("polynomial fiber mode needs fiber_coefficients")
            coef = np.asarray(self.fiber_coefficients, dtype=float)
            if coef.ndim != 3 or coef.shape[:2] != (S, self.base.dim):
                raise ValueError(
                    f"fiber_coefficients must have shape ({S}, {self.base.dim}, K), got {coef.shape}"
                )
        return self

    @property
    def bound(self) -> float:
        """Roof bound L with 1/L <= tau <= L."""
        if self.roof_bound is not None:
            return float(self.roof_bound)
        tau = np.asarray(self.tau, dtype=float)
        return float(max(tau.max(), 1.0 / tau.min()))

    @cached_property
    def roof(self) -> np.ndarray:
        tau = np.asarray(self.tau, dtype=float)
        tau.setflags(write=False)
        return tau

    @cached_property
    def raw_coefficients(self) -> np.ndarray:
        """Uncentered fiber polynomials, shape (S, d, K)."""
        if self.fiber_mode == "constant":
            coef = self.base.raw_observable[:, :, None].copy()
        else:
            coef = np.asarray(self.fiber_coefficients, dtype=float)
        coef.setflags(write=False)
        return coef

    @property
    def label(self) -> str:
        return self.name or f"suspension-{self.base.label}"
