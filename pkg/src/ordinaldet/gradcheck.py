"""Central finite-difference gradient checks."""

from __future__ import annotations

from typing import Callable

import numpy as np

STEP = 1e-6
RTOL = 1e-6
ATOL = 1e-9  # per unit of |loss|: fp64 round-off in a step-1e-6 difference is ~2e-10 * |loss|


def noise_floor(value: float, atol: float = ATOL) -> float:
    """Absolute disagreement attributable to finite-difference round-off."""
    return atol * max(1.0, abs(value))


def central_difference(fn: Callable[[np.ndarray], float], z, step: float = STEP) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    grad = np.empty_like(z)
    for i in range(z.size):
        up = z.copy()
        down = z.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (fn(up) - fn(down)) / (up[i] - down[i])
    return grad


def relative_errors(analytic, numeric, atol: float = ATOL) -> np.ndarray:
    """Componentwise |a - n| / max(|a|, |n|), with differences below ``atol`` counted as 0.

    Pass ``noise_floor(loss_value)`` as ``atol`` when the loss is large.
    """
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    diff = np.abs(a - n)
    scale = np.maximum(np.abs(a), np.abs(n))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(diff <= atol, 0.0, diff / scale)
    return rel


def max_relative_error(analytic, numeric, atol: float = ATOL) -> float:
    return float(np.max(relative_errors(analytic, numeric, atol)))
