"""
Vector fields for rough differential equations.

Fields are batched callables: for states of shape (..., e), ``b`` returns
(..., e), ``sigma`` returns (..., e, d) and ``dsigma`` returns (..., e, d, e)
with ``dsigma[..., i, j, k] = d sigma_ij / d x_k``. Every ``FieldSpec`` checks
its derivative against central finite differences when it is built.

Named families are registered in ``FIELD_FAMILIES`` so experiment configs can
refer to them by id.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from roughflow.errors import ConfigError, DerivativeCheckError, DimensionMismatchError
from roughflow.log import get_logger
from roughflow.rng import STREAM_PROBE, generator

logger = get_logger(__name__)

FD_STEP = 1e-6
FD_RTOL = 1e-5
FD_POINTS = 8

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """
    Drift b: R^e -> R^e and diffusion sigma: R^e -> R^{e x d} with Jacobian.

    Attributes:
        e: State dimension
        d: Noise dimension
        b: Drift
        sigma: Diffusion matrix
        dsigma: Derivative tensor of sigma
        name: Family id used in reports
        params: Family parameters, recorded in experiment manifests
    """

    e: int
    d: int
    b: Field
    sigma: Field
    dsigma: Field
    name: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.e < 1 or self.d < 1:
            raise DimensionMismatchError(f"field dimensions must be positive, got e={self.e}, d={self.d}")
        check_derivative(self)

    def bound(self, points: int = 4096, scale: float = 10.0) -> Dict[str, float]:
        """
        Empirical sup of |b|, |sigma| and |D sigma| over a Gaussian probe cloud.

        The reported ``L`` is max(1, all three); it is an estimate, not a
        certified bound.
        """
        x = scale * generator(0, STREAM_PROBE).standard_normal((points, self.e))
        sup_b = float(np.max(np.linalg.norm(self.b(x), axis=-1)))
        sup_sigma = float(np.max(np.linalg.norm(self.sigma(x), axis=(-2, -1))))
        sup_dsigma = float(np.max(np.linalg.norm(self.dsigma(x).reshape(points, -1), axis=-1)))
        return {"b": sup_b, "sigma": sup_sigma, "dsigma": sup_dsigma,
                "L": max(1.0, sup_b, sup_sigma, sup_dsigma)}

    def manifest(self) -> Dict[str, Any]:
        return {"family": self.name, "e": self.e, "d": self.d, "params": self.params}


def check_derivative(fields: FieldSpec, step: float = FD_STEP, rtol: float = FD_RTOL) -> float:
    """
    Compare ``dsigma`` with central differences of ``sigma`` at random points.

    Returns:
        Worst relative error

    Raises:
        DerivativeCheckError: error above ``rtol``
        DimensionMismatchError: callables return the wrong shapes
    """
    e, d = fields.e, fields.d
    x = generator(0, STREAM_PROBE).standard_normal((FD_POINTS, e))
    sig = np.asarray(fields.sigma(x))
    jac = np.asarray(fields.dsigma(x))
    drift = np.asarray(fields.b(x))
    for label, value, shape in (("b", drift, (FD_POINTS, e)), ("sigma", sig, (FD_POINTS, e, d)),
                                ("dsigma", jac, (FD_POINTS, e, d, e))):
        if value.shape != shape:
            raise DimensionMismatchError(f"{fields.name}: {label} returned shape {value.shape}, expected {shape}")
    worst = 0.0
    for k in range(e):
        shift = np.zeros(e)
        shift[k] = step
        fd = (fields.sigma(x + shift) - fields.sigma(x - shift)) / (2.0 * step)
        err = np.max(np.abs(fd - jac[..., k]))
        worst = max(worst, float(err / max(1.0, float(np.max(np.abs(jac[..., k]))))))
    if worst > rtol:
        raise DerivativeCheckError(
            f"{fields.name}: dsigma disagrees with finite differences (relative error {worst:.3g} > {rtol:g})"
        )
    return worst


def _matrix(value, shape, label: str) -> np.ndarray:
    out = np.asarray(value, dtype=float)
    if out.size != int(np.prod(shape)):
        raise DimensionMismatchError(f"{label} must have {int(np.prod(shape))} entries for shape {shape}")
    return out.reshape(shape)


def linear(B=None, b0=None, sigma0=None, A=None, e: int = 1, d: int = 1, name: str = "linear") -> FieldSpec:
    """
    b(x) = B x + b0 and sigma(x) = sigma0 + sum_k x_k A_k.

    Args:
        B: e x e drift matrix
        b0: Drift offset, length e
        sigma0: e x d constant diffusion
        A: Tensor of shape (e, e, d); A[k] multiplies x_k
    """
    B = np.zeros((e, e)) if B is None else _matrix(B, (e, e), "B")
    b0 = np.zeros(e) if b0 is None else _matrix(b0, (e,), "b0")
    sigma0 = np.zeros((e, d)) if sigma0 is None else _matrix(sigma0, (e, d), "sigma0")
    A = np.zeros((e, e, d)) if A is None else _matrix(A, (e, e, d), "A")
    jac = np.transpose(A, (1, 2, 0))

    def b(x):
        return x @ B.T + b0

    def sigma(x):
        return sigma0 + np.einsum("...k,kij->...ij", x, A)

    def dsigma(x):
        return np.broadcast_to(jac, x.shape[:-1] + jac.shape).copy()

    params = {"B": B.tolist(), "b0": b0.tolist(), "sigma0": sigma0.tolist(), "A": A.tolist()}
    return FieldSpec(e, d, b, sigma, dsigma, name=name, params=params)


def trigonometric(C, A, W, phase=None, bC=None, bA=None, bW=None, bphase=None,
                  e: int = 1, d: int = 1, name: str = "trigonometric") -> FieldSpec:
    """
    sigma_ij(x) = C_ij + A_ij sin(<w_ij, x> + phase_ij), with b of the same form.

    W has shape (e, d, e); bW has shape (e, e). All fields are bounded with
    bounded derivatives of every order.
    """
    C = _matrix(C, (e, d), "C")
    A = _matrix(A, (e, d), "A")
    W = _matrix(W, (e, d, e), "W")
    phase = np.zeros((e, d)) if phase is None else _matrix(phase, (e, d), "phase")
    bC = np.zeros(e) if bC is None else _matrix(bC, (e,), "bC")
    bA = np.zeros(e) if bA is None else _matrix(bA, (e,), "bA")
    bW = np.zeros((e, e)) if bW is None else _matrix(bW, (e, e), "bW")
    bphase = np.zeros(e) if bphase is None else _matrix(bphase, (e,), "bphase")

    def b(x):
        return bC + bA * np.sin(x @ bW.T + bphase)

    def _arg(x):
        return np.einsum("...k,ijk->...ij", x, W) + phase

    def sigma(x):
        return C + A * np.sin(_arg(x))

    def dsigma(x):
        return (A * np.cos(_arg(x)))[..., None] * W

    params = {"C": C.tolist(), "A": A.tolist(), "W": W.tolist(), "phase": phase.tolist(),
              "bC": bC.tolist(), "bA": bA.tolist(), "bW": bW.tolist(), "bphase": bphase.tolist()}
    return FieldSpec(e, d, b, sigma, dsigma, name=name, params=params)


def sine_scalar(offset: float = 1.0, amplitude: float = 0.5) -> FieldSpec:
    """sigma(x) = offset + amplitude sin x, b = 0, on e = d = 1."""
    return trigonometric([[offset]], [[amplitude]], [[[1.0]]], name="sine-scalar")


def geometric(rate: float = 1.0, drift: float = 0.0) -> FieldSpec:
    """sigma(x) = rate x, b(x) = drift x, on e = d = 1."""
    return linear(B=[[drift]], A=[[[rate]]], name="geometric")


def identity(e: int = 1) -> FieldSpec:
    """sigma = I, b = 0, so the solution is y0 plus the driver."""
    return linear(sigma0=np.eye(e), e=e, d=e, name="identity")


def constant(sigma0, b0=None) -> FieldSpec:
    sigma0 = np.atleast_2d(np.asarray(sigma0, dtype=float))
    e, d = sigma0.shape
    return linear(b0=b0, sigma0=sigma0, e=e, d=d, name="constant")


def random_trigonometric(e: int, d: int, seed: int = 0, scale: float = 0.5) -> FieldSpec:
    """A random bounded smooth field, used by property tests."""
    rng = generator(seed, STREAM_PROBE, 1)
    return trigonometric(
        C=rng.normal(size=(e, d)),
        A=scale * rng.normal(size=(e, d)),
        W=rng.normal(size=(e, d, e)),
        phase=rng.uniform(0.0, 2.0 * np.pi, size=(e, d)),
        bC=rng.normal(size=e),
        bA=scale * rng.normal(size=e),
        bW=rng.normal(size=(e, e)),
        bphase=rng.uniform(0.0, 2.0 * np.pi, size=e),
        e=e,
        d=d,
        name="random-trigonometric",
    )


FIELD_FAMILIES: Dict[str, Callable[..., FieldSpec]] = {
    "linear": linear,
    "trigonometric": trigonometric,
    "sine-scalar": sine_scalar,
    "geometric": geometric,
    "identity": identity,
    "constant": constant,
    "random-trigonometric": random_trigonometric,
}


def build_field(family: str, params: Optional[Dict[str, Any]] = None) -> FieldSpec:
    """Build a registered family from keyword parameters."""
    builder = FIELD_FAMILIES.get(family)
    if builder is None:
        raise ConfigError(f"Unknown field family: {family}",
                          [{"loc": "field.family", "msg": f"unknown family {family!r}"}])
    try:
        spec = builder(**(params or {}))
    except TypeError as exc:
        raise ConfigError(f"Bad parameters for field family {family}: {exc}",
                          [{"loc": "field.params", "msg": str(exc)}]) from None
    logger.debug("built field family %s (e=%d, d=%d)", family, spec.e, spec.d)
    return spec
