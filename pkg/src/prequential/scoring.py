"""Log and Hyvarinen scores for Gaussian predictives, and prequential deltas.

Orientation: scores are losses, smaller is better. Every delta is
``S(x, Q) - S(x, P)``, so a positive cumulative delta favours ``P``.

For a predictive N(mu, s2):

    log score        0.5 * (log(2 pi s2) + (x - mu)^2 / s2)
    Hyvarinen score  -2 / s2 + (x - mu)^2 / s2^2

The Hyvarinen term divides the squared residual by the *squared* variance,
so Hyvarinen deltas carry units of 1/data^2 while log deltas are unitless.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from . import kernels
from .exceptions import SeriesTooShortError
from .models import GaussianPredictive, ProcessModel

__all__ = [
    "Decision",
    "DeltaPath",
    "GaussianPredictive",
    "classify",
    "cumulative_delta",
    "delta_hyv_step",
    "delta_log_step",
    "gaussian_log_density",
    "hyvarinen_fd_oracle",
    "hyvarinen_score",
    "log_score",
]

_LOG_2PI = math.log(2.0 * math.pi)


class Decision(str, enum.Enum):
    SELECT_P = "P"
    SELECT_Q = "Q"
    TIE = "TIE"


@dataclass(frozen=True)
class DeltaPath:
    """Per-step and cumulative deltas for one series.

    ``per_step_log[k]`` belongs to observation ``k + 2`` (1-based).
    """

    per_step_log: np.ndarray
    per_step_hyv: np.ndarray
    cumulative_log: float
    cumulative_hyv: float

    def __len__(self) -> int:
        return len(self.per_step_log)


def log_score(x: float, pred: GaussianPredictive) -> float:
    """Negative log density of ``x`` under ``pred``."""
    r = x - pred.mean
    return 0.5 * (_LOG_2PI + math.log(pred.variance) + r * r / pred.variance)


def hyvarinen_score(x: float, pred: GaussianPredictive) -> float:
    """``2 * d2/dx2 log p(x) + (d/dx log p(x))^2`` for a Gaussian ``p``."""
    r = x - pred.mean
    v = pred.variance
    return r * r / (v * v) - 2.0 / v


def delta_log_step(x: float, pred_p: GaussianPredictive, pred_q: GaussianPredictive) -> float:
    rp = x - pred_p.mean
    rq = x - pred_q.mean
    return 0.5 * (
        (math.log(pred_q.variance) + rq * rq / pred_q.variance)
        - (math.log(pred_p.variance) + rp * rp / pred_p.variance)
    )


def delta_hyv_step(x: float, pred_p: GaussianPredictive, pred_q: GaussianPredictive) -> float:
    return hyvarinen_score(x, pred_q) - hyvarinen_score(x, pred_p)


def gaussian_log_density(mean, variance) -> Callable:
    """Gaussian log density built from mpmath primitives.

    Works for float and ``mpmath.mpf`` arguments; with mpf input the result
    keeps the working precision, which is what the finite-difference
    oracle needs.
    """
    mean = mpmath.mpf(mean)
    variance = mpmath.mpf(variance)

    def log_density(x):
        r = x - mean
        return -(mpmath.log(2 * mpmath.pi * variance) + r * r / variance) / 2

    return log_density


def hyvarinen_fd_oracle(
    x: float,
    log_density: Callable,
    h: float = 1e-4,
    dps: int | None = 50,
) -> float:
    """Hyvarinen score from central finite differences of ``log_density``.

    Uses ``2 * (f(x+h) - 2 f(x) + f(x-h)) / h^2 + ((f(x+h) - f(x-h)) / 2h)^2``.
    In double precision the second difference loses about ``eps * |f| / h^2``,
    which exceeds 1e-6 once variances get small, so by default ``x`` and ``h``
    are promoted to ``mpf`` and evaluated at ``dps`` decimal digits.
    ``log_density`` must then accept mpf (see :func:`gaussian_log_density`).
    Pass ``dps=None`` to stay in plain float arithmetic.
    """
    if h <= 0:
        raise ValueError("h must be positive")

    def fd(xv, hv):
        f0 = log_density(xv)
        fp = log_density(xv + hv)
        fm = log_density(xv - hv)
        second = (fp - 2 * f0 + fm) / (hv * hv)
        first = (fp - fm) / (2 * hv)
        return 2 * second + first * first

    if dps is None:
        return float(fd(float(x), float(h)))
    with mpmath.workdps(dps):
        return float(fd(mpmath.mpf(x), mpmath.mpf(h)))


def _as_series(series) -> np.ndarray:
    x = np.ascontiguousarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.shape[0] < 2:
        raise SeriesTooShortError(f"scoring needs n >= 2 observations, got {x.shape[0]}")
    return x


def cumulative_delta(series, model_p: ProcessModel, model_q: ProcessModel) -> DeltaPath:
    """Prequential deltas of ``model_q`` against ``model_p`` over observations 2..n."""
    x = _as_series(series)
    d_log, d_hyv = kernels.delta_steps(
        x,
        model_p.mean, model_p.phi, model_p.innovation_variance,
        model_q.mean, model_q.phi, model_q.innovation_variance,
    )
    c_log, c_hyv = kernels.cumulative_deltas(
        x[None, :],
        model_p.mean, model_p.phi, model_p.innovation_variance,
        model_q.mean, model_q.phi, model_q.innovation_variance,
    )
    return DeltaPath(d_log, d_hyv, float(c_log[0]), float(c_hyv[0]))


def classify(cumulative: float, cutoff: float = 0.0) -> Decision:
    """Above the cutoff selects P, below selects Q, exactly on it is a tie."""
    if cumulative > cutoff:
        return Decision.SELECT_P
    if cumulative < cutoff:
        return Decision.SELECT_Q
    return Decision.TIE
