"""Exact affine relations between per-step Hyvarinen and log deltas.

For two AR(1)/iid Gaussian models with constant conditional variances the
per-step deltas satisfy ``d_hyv = intercept + slope * d_log`` for every
observation and history in two cases:

* equal innovation variances ``t2``: intercept 0, slope ``2 / t2``;
* equal conditional means, variances ``t2_p != t2_q``::

      slope     = 2 * (1/t2_q + 1/t2_p)
      intercept = 2 * (1/t2_p - 1/t2_q) - (1/t2_q + 1/t2_p) * log(t2_q / t2_p)

Summing over ``n - 1`` steps keeps the slope and multiplies the intercept
by ``n - 1``. Because the slope is positive, a cutoff ``c`` on the log
delta maps to the cutoff ``intercept + slope * c`` on the Hyvarinen delta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError
from .models import ProcessModel

__all__ = [
    "AffineCase",
    "AffineRelation",
    "affine_relation",
    "conditional_means_agree",
    "empirical_affine_residual",
    "fit_affine",
]


class AffineCase(str, enum.Enum):
    EQUAL_VARIANCES = "EqualVariances"
    EQUAL_MEANS = "EqualMeans"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class AffineRelation:
    intercept: float
    slope: float
    case: AffineCase

    def __call__(self, delta_log):
        return self.intercept + self.slope * delta_log

    def cumulative(self, n_steps: int) -> "AffineRelation":
        """Relation between sums of ``n_steps`` per-step deltas."""
        return AffineRelation(n_steps * self.intercept, self.slope, self.case)

    def hyv_cutoff(self, log_cutoff: float) -> float:
        """Hyvarinen cutoff giving the same decisions as ``log_cutoff``."""
        return self.intercept + self.slope * log_cutoff


def conditional_means_agree(model_p: ProcessModel, model_q: ProcessModel) -> bool:
    """True when both models predict the same mean after every history.

    The predictive mean is ``(1 - phi) * mean + phi * prev``, so agreement
    for all ``prev`` means equal ``phi`` and equal ``(1 - phi) * mean``.
    """
    return model_p.phi == model_q.phi and (
        (1.0 - model_p.phi) * model_p.mean == (1.0 - model_q.phi) * model_q.mean
    )


def affine_relation(model_p: ProcessModel, model_q: ProcessModel) -> AffineRelation | None:
    """Exact per-step relation, or ``None`` when none is claimed.

    Identical predictives are reported as ``DEGENERATE`` with the
    equal-variance coefficients; the relation holds vacuously.
    """
    vp = model_p.innovation_variance
    vq = model_q.innovation_variance
    same_means = conditional_means_agree(model_p, model_q)
    if vp == vq:
        case = AffineCase.DEGENERATE if same_means else AffineCase.EQUAL_VARIANCES
        return AffineRelation(0.0, 2.0 / vp, case)
    if same_means:
        s = 1.0 / vq + 1.0 / vp
        intercept = 2.0 * (1.0 / vp - 1.0 / vq) - s * math.log(vq / vp)
        return AffineRelation(intercept, 2.0 * s, AffineCase.EQUAL_MEANS)
    return None


def fit_affine(delta_log, delta_hyv) -> tuple[float, float, np.ndarray]:
    """Least-squares fit ``delta_hyv ~ intercept + slope * delta_log``.

    Returns ``(intercept, slope, residuals)``. Inputs are centred before
    solving so large offsets do not cost precision.
    """
    x = np.asarray(delta_log, dtype=np.float64)
    y = np.asarray(delta_hyv, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("delta_log and delta_hyv must be 1-D and equally long")
    if x.size < 3:
        raise DegenerateInputError("an affine fit needs at least 3 pairs")
    x_bar = x.mean()
    y_bar = y.mean()
    dx = x - x_bar
    sxx = float(dx @ dx)
    if sxx == 0.0 or np.all(x == x[0]):
        raise DegenerateInputError("all delta_log values coincide; slope undefined")
    slope = float(dx @ (y - y_bar)) / sxx
    intercept = float(y_bar - slope * x_bar)
    residuals = y - (intercept + slope * x)
    return intercept, slope, residuals


def empirical_affine_residual(pairs) -> float:
    """Largest absolute residual of the least-squares line through the pairs.

    ``pairs`` is a sequence of ``(delta_log, delta_hyv)`` or an (n, 2) array.
    """
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must have shape (n, 2)")
    _, _, residuals = fit_affine(arr[:, 0], arr[:, 1])
    return float(np.max(np.abs(residuals)))
