"""Shared quadrature helpers.

Periodic integrands are handled with the equal-weight trapezoid rule
(spectrally accurate for smooth periodic functions), with point doubling
until two successive estimates agree.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["ConvergenceError", "periodic_trapezoid"]

MAX_POINTS = 2**18


class ConvergenceError(RuntimeError):
    """An iterative numeric scheme failed to reach its tolerance."""


def periodic_trapezoid(
    func: Callable[[np.ndarray], np.ndarray],
    period: float,
    rtol: float = 1e-10,
    atol: float = 0.0,
    start: int = 64,
    max_points: int = MAX_POINTS,
) -> complex:
    """Integrate ``func`` over one period, doubling points until converged.

    ``func`` takes an array of sample times and returns the integrand
    values (real or complex).
    """
    if period <= 0.0:
        raise ValueError("period must be positive")
    m = start
    prev = None
    while m <= max_points:
        t = np.arange(m) * (period / m)
        val = complex(np.mean(func(t)) * period)
        if prev is not None and abs(val - prev) <= rtol * abs(val) + atol:
            return val
        prev = val
        m *= 2
    raise ConvergenceError(
        f"periodic trapezoid rule did not converge within {max_points} points"
    )
