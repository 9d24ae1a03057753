"""Numeric inner loops: AR(1) path generation and prequential delta scores.

Every kernel exists twice. The ``*_loop`` functions are plain loops that
numba compiles with ``@njit``; the ``*_numpy`` functions are vectorised
numpy equivalents used when numba is unavailable or disabled. The public
names (``ar1_paths``, ``delta_steps``, ``cumulative_deltas``) are bound to
one family at import time:

* ``PREQUENTIAL_DISABLE_NUMBA=1`` forces the numpy family;
* otherwise numba is used when it imports cleanly.

``BACKEND`` records the choice. Both families follow the same formulas and
the same operation order, so they agree to a few ulps; path generation
agrees bit-for-bit.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "NUMBA_AVAILABLE",
    "ar1_paths",
    "cumulative_deltas",
    "delta_steps",
    "numba_kernels",
    "numpy_kernels",
]

_TRUTHY = {"1", "true", "yes", "on"}


def _numba_disabled() -> bool:
    return os.environ.get("PREQUENTIAL_DISABLE_NUMBA", "").strip().lower() in _TRUTHY


# ---------------------------------------------------------------------------
# Loop kernels (numba sources; also runnable as plain Python)
# ---------------------------------------------------------------------------


def _ar1_paths_loop(z, mean, phi, innovation_variance):
    n_paths, n = z.shape
    out = np.empty((n_paths, n))
    sd = math.sqrt(innovation_variance)
    sd0 = math.sqrt(innovation_variance / (1.0 - phi * phi))
    for r in range(n_paths):
        prev = mean + sd0 * z[r, 0]
        out[r, 0] = prev
        for i in range(1, n):
            prev = mean + phi * (prev - mean) + sd * z[r, i]
            out[r, i] = prev
    return out


def _delta_steps_loop(x, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    n = x.shape[0]
    d_log = np.empty(n - 1)
    d_hyv = np.empty(n - 1)
    log_var_p = math.log(var_p)
    log_var_q = math.log(var_q)
    for i in range(1, n):
        prev = x[i - 1]
        rp = x[i] - (mean_p + phi_p * (prev - mean_p))
        rq = x[i] - (mean_q + phi_q * (prev - mean_q))
        sq_p = rp * rp
        sq_q = rq * rq
        d_log[i - 1] = 0.5 * ((log_var_q + sq_q / var_q) - (log_var_p + sq_p / var_p))
        d_hyv[i - 1] = (sq_q / (var_q * var_q) - 2.0 / var_q) - (
            sq_p / (var_p * var_p) - 2.0 / var_p
        )
    return d_log, d_hyv


def _cumulative_deltas_loop(xs, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    n_paths = xs.shape[0]
    c_log = np.empty(n_paths)
    c_hyv = np.empty(n_paths)
    for r in range(n_paths):
        d_log, d_hyv = _delta_steps_impl(xs[r], mean_p, phi_p, var_p, mean_q, phi_q, var_q)
        c_log[r] = _sequential_sum(d_log)
        c_hyv[r] = _sequential_sum(d_hyv)
    return c_log, c_hyv


def _sequential_sum_loop(values):
    total = 0.0
    for v in values:
        total += v
    return total


# ---------------------------------------------------------------------------
# Numpy kernels
# ---------------------------------------------------------------------------


def _ar1_paths_numpy(z, mean, phi, innovation_variance):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    sd = math.sqrt(innovation_variance)
    sd0 = math.sqrt(innovation_variance / (1.0 - phi * phi))
    out[:, 0] = mean + sd0 * z[:, 0]
    # recursion is sequential in time; vectorise across paths only
    for i in range(1, z.shape[1]):
        out[:, i] = mean + phi * (out[:, i - 1] - mean) + sd * z[:, i]
    return out


def _delta_steps_numpy(x, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    x = np.asarray(x, dtype=np.float64)
    prev, cur = x[..., :-1], x[..., 1:]
    sq_p = np.square(cur - (mean_p + phi_p * (prev - mean_p)))
    sq_q = np.square(cur - (mean_q + phi_q * (prev - mean_q)))
    log_var_p = math.log(var_p)
    log_var_q = math.log(var_q)
    d_log = 0.5 * ((log_var_q + sq_q / var_q) - (log_var_p + sq_p / var_p))
    d_hyv = (sq_q / (var_q * var_q) - 2.0 / var_q) - (sq_p / (var_p * var_p) - 2.0 / var_p)
    return d_log, d_hyv


def _cumulative_deltas_numpy(xs, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    d_log, d_hyv = _delta_steps_numpy(xs, mean_p, phi_p, var_p, mean_q, phi_q, var_q)
    # cumsum is strictly left-to-right, matching the loop kernel's order
    return np.cumsum(d_log, axis=1)[:, -1], np.cumsum(d_hyv, axis=1)[:, -1]


# ---------------------------------------------------------------------------
# Backend selection
# ---------------------------------------------------------------------------

try:
    import numba as _numba
except ImportError:  # pragma: no cover - exercised only without numba
    _numba = None

NUMBA_AVAILABLE = _numba is not None


class _Kernels:
    def __init__(self, name, ar1_paths, delta_steps, cumulative_deltas):
        self.name = name
        self.ar1_paths = ar1_paths
        self.delta_steps = delta_steps
        self.cumulative_deltas = cumulative_deltas


numpy_kernels = _Kernels(
    "numpy", _ar1_paths_numpy, _delta_steps_numpy, _cumulative_deltas_numpy
)

if NUMBA_AVAILABLE:
    _jit = _numba.njit(cache=True, nogil=True)
    _sequential_sum = _jit(_sequential_sum_loop)
    _delta_steps_impl = _jit(_delta_steps_loop)
    numba_kernels: _Kernels | None = _Kernels(
        "numba",
        _jit(_ar1_paths_loop),
        _delta_steps_impl,
        _jit(_cumulative_deltas_loop),
    )
else:  # pragma: no cover
    _sequential_sum = _sequential_sum_loop
    _delta_steps_impl = _delta_steps_loop
    numba_kernels = None

_active = numpy_kernels if (numba_kernels is None or _numba_disabled()) else numba_kernels
BACKEND: str = _active.name


def ar1_paths(z: np.ndarray, mean: float, phi: float, innovation_variance: float) -> np.ndarray:
    """Turn standard normals ``z`` of shape (paths, n) into stationary AR(1) paths.

    Column 0 is scaled by the stationary standard deviation, the rest by the
    innovation standard deviation.
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError("z must be two-dimensional (paths, n)")
    return _active.ar1_paths(z, float(mean), float(phi), float(innovation_variance))


def delta_steps(x, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    """Per-step (log, Hyvarinen) deltas S(x_i, Q_i) - S(x_i, P_i), i = 2..n."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _active.delta_steps(
        x, float(mean_p), float(phi_p), float(var_p), float(mean_q), float(phi_q), float(var_q)
    )


def cumulative_deltas(xs, mean_p, phi_p, var_p, mean_q, phi_q, var_q):
    """Row-wise cumulative (log, Hyvarinen) deltas for a (paths, n) array."""
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 2:
        raise ValueError("xs must be two-dimensional (paths, n)")
    return _active.cumulative_deltas(
        xs, float(mean_p), float(phi_p), float(var_p), float(mean_q), float(phi_q), float(var_q)
    )
