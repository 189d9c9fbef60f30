"""Log-log rate fits."""

from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from roughflow.errors import InvalidParameterError


class RateFit(BaseModel):
    """
    Least-squares fit log error = intercept - delta log N.

    Attributes:
        x: log N
        y: log error
        delta: Decay rate, minus the fitted slope
        intercept: Fitted intercept
        r2: Coefficient of determination
    """

    model_config = ConfigDict(frozen=True)

    x: List[float]
    y: List[float]
    delta: float
    intercept: float
    r2: float

    def passes(self, min_delta: float, min_r2: float) -> bool:
        return self.delta > min_delta and self.r2 > min_r2


def fit_rate(N: Sequence[float], errors: Sequence[float]) -> RateFit:
    """
    Fit the decay rate of ``errors`` in ``N``; non-positive errors are dropped.

    Raises:
        InvalidParameterError: fewer than two usable points
    """
    N = np.asarray(N, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = (errors > 0) & np.isfinite(errors) & (N > 0)
    if keep.sum() < 2:
        raise InvalidParameterError(f"a rate fit needs at least two positive errors, got {int(keep.sum())}")
    x, y = np.log(N[keep]), np.log(errors[keep])
    fit = stats.linregress(x, y)
    delta = -float(fit.slope)
    if not np.isfinite(delta):
        raise InvalidParameterError("rate fit produced a non-finite slope")
    return RateFit(x=x.tolist(), y=y.tolist(), delta=delta, intercept=float(fit.intercept),
                   r2=float(fit.rvalue ** 2))
