"""Gaussian AR(1) process models, simulation and additive-outlier contamination.

A :class:`ProcessModel` describes

    x_i = mean + phi * (x_{i-1} - mean) + e_i,    e_i ~ N(0, innovation_variance)

with ``phi = 0`` giving an iid Gaussian sequence. Series are plain 1-D
``float64`` numpy arrays. Contamination indices are 1-based, so index 50
of a length-101 series is ``values[49]``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .exceptions import (
    ContaminationIndexError,
    InvalidModelError,
    NonstationaryModelError,
)

__all__ = [
    "GaussianPredictive",
    "ProcessModel",
    "conditional_predictive",
    "contaminate",
    "load_series",
    "make_rng",
    "save_series",
    "simulate_series",
    "stationary_distribution",
]


def _check_variance(value: float, what: str) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise InvalidModelError(f"{what} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class GaussianPredictive:
    """One-step predictive N(mean, variance)."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        _check_variance(self.variance, "predictive variance")
        if not math.isfinite(self.mean):
            raise InvalidModelError(f"predictive mean must be finite, got {self.mean!r}")


@dataclass(frozen=True)
class ProcessModel:
    """Gaussian AR(1) process with mean ``mean`` and coefficient ``phi``.

    Scoring only needs ``innovation_variance > 0``; simulation and the
    stationary distribution additionally need ``|phi| < 1``.
    """

    mean: float = 0.0
    phi: float = 0.0
    innovation_variance: float = 1.0

    def __post_init__(self) -> None:
        _check_variance(self.innovation_variance, "innovation_variance")
        if not (math.isfinite(self.mean) and math.isfinite(self.phi)):
            raise InvalidModelError("mean and phi must be finite")

    @property
    def is_stationary(self) -> bool:
        return abs(self.phi) < 1.0

    def require_stationary(self) -> None:
        if not self.is_stationary:
            raise NonstationaryModelError(
                f"stationarity requires |phi| < 1, got phi={self.phi!r}"
            )


def conditional_predictive(model: ProcessModel, previous_value: float) -> GaussianPredictive:
    """Predictive of the next observation given the preceding one."""
    mean = model.mean + model.phi * (previous_value - model.mean)
    return GaussianPredictive(mean, model.innovation_variance)


def stationary_distribution(model: ProcessModel) -> GaussianPredictive:
    """Marginal N(mean, tau^2 / (1 - phi^2)); raises for |phi| >= 1."""
    model.require_stationary()
    return GaussianPredictive(
        model.mean, model.innovation_variance / (1.0 - model.phi * model.phi)
    )


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    """PCG64 stream derived from ``seed`` and an optional counter key.

    ``make_rng(seed, r)`` gives replication ``r`` its own stream, independent
    of every other ``r`` and of the order in which streams are created.
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.PCG64(seq))


def simulate_series(model: ProcessModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a length-``n`` series, starting from the stationary distribution.

    Consumes exactly ``n`` standard normals from ``rng``.
    """
    model.require_stationary()
    if n < 2:
        raise ValueError(f"series length must be >= 2, got {n}")
    z = rng.standard_normal((1, n))
    return kernels.ar1_paths(z, model.mean, model.phi, model.innovation_variance)[0]


def contaminate(series, index: int, shift: float) -> np.ndarray:
    """Copy of ``series`` with ``shift`` added at the 1-based ``index``."""
    out = np.array(series, dtype=np.float64, copy=True)
    if not 1 <= index <= out.shape[0]:
        raise ContaminationIndexError(
            f"contamination index {index} outside 1..{out.shape[0]}"
        )
    out[index - 1] += shift
    return out


def load_series(path: str | os.PathLike) -> np.ndarray:
    """Read a series file: one number per line, '#' comments and blanks ignored."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    return np.asarray(values, dtype=np.float64)


def format_series(values: Iterable[float]) -> str:
    return "".join(f"{float(v):.17g}\n" for v in values)


def save_series(values: Iterable[float], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_series(values))
