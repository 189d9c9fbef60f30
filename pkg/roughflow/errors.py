"""
Exception hierarchy for roughflow.

Input problems derive from ``ValueError`` as well as ``RoughflowError`` so
callers can catch either. Numerical failures raised mid-computation derive
from ``ArithmeticError`` where that reads naturally.
"""

from typing import Any, Dict, List, Optional


class RoughflowError(Exception):
    """Base class for every error raised by roughflow."""


class DimensionMismatchError(RoughflowError, ValueError):
    """Operands disagree in dimension, depth or shape."""


class InvalidParameterError(RoughflowError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class GridMismatchError(RoughflowError, ValueError):
    """Two paths do not share a grid, or a time is not a grid point."""


class NonStochasticMatrixError(RoughflowError, ValueError):
    """Transition matrix rows are not probability vectors."""


class NonCenteredObservableError(RoughflowError, ValueError):
    """The observable has nonzero stationary mean where centering is required."""


class InexactFiberModeError(RoughflowError, ValueError):
    """Fiber observable has no exact antiderivative in closed form."""


class NonSummableMixingError(RoughflowError, ArithmeticError):
    """Lagged covariances are not summable, so Gamma and varsigma are undefined."""

    def __init__(self, message: str, spectral_radius: float):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class ClosedFormMismatchError(RoughflowError, ArithmeticError):
    """Truncated lag sum and closed-form Gamma disagree beyond the tail bound."""

    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


class DerivativeCheckError(RoughflowError, ValueError):
    """Supplied derivative of sigma disagrees with finite differences."""


class NonFiniteStateError(RoughflowError, ArithmeticError):
    """Solver state became NaN or infinite."""

    def __init__(self, message: str, step: int, time: Optional[float] = None):
        super().__init__(message)
        self.step = step
        self.time = time


class ExplosionError(NonFiniteStateError):
    """Solver state left the explosion bound."""


class ConfigError(RoughflowError, ValueError):
    """Experiment configuration failed validation."""

    def __init__(self, message: str, fields: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.fields = fields or []

    @classmethod
    def from_validation(cls, exc: Any, source: str = "config") -> "ConfigError":
        """Build from a pydantic ``ValidationError``, keeping each key path."""
        fields = []
        for item in exc.errors():
            fields.append({
                "loc": ".".join(str(part) for part in item.get("loc", ())),
                "msg": item.get("msg", ""),
                "type": item.get("type", ""),
            })
        listing = "; ".join(f"{f['loc']}: {f['msg']}" for f in fields)
        return cls(f"Invalid {source}: {listing}", fields)
