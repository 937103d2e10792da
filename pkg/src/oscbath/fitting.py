"""Exponential decay-rate extraction from population trajectories.

Log-domain linear least squares: the model is a pure exponential in the
Markovian regimes, so the log fit is convex and deterministic.  The fit
window skips the short-time (Zeno) transient and per-period ripple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

__all__ = ["DecayFit", "fit_decay_rate"]

DEFAULT_POP_FLOOR = 1e-3
TRANSIENT_PERIODS = 3
MIN_WINDOW_PERIODS = 5


@dataclass(frozen=True)
class DecayFit:
    """Fitted exponential decay of a population trajectory."""

    rate: float
    intercept: float
    rms_residual: float
    window: Tuple[float, float]


def fit_decay_rate(
    series,
    window: Optional[Tuple[float, float]] = None,
    period: Optional[float] = None,
    pop_floor: float = DEFAULT_POP_FLOOR,
) -> DecayFit:
    """Fit ln(population) = intercept - rate * t over the window.

    ``series`` is a sequence of (t, population) pairs.  Without an
    explicit window, the fit runs from 3 modulation periods (skipping the
    non-exponential transient) down to the time the population first
    drops below ``pop_floor``; ``period`` is then required.  The window
    must span at least 5 periods when a period is known.
    """
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise ValueError("series must be a sequence of (t, population) pairs")
    t = data[:, 0]
    pop = data[:, 1]

    if window is None:
        if period is None:
            raise ValueError("either an explicit window or a period is required")
        t_start = TRANSIENT_PERIODS * period
        below = np.nonzero(pop <= pop_floor)[0]
        t_end = t[below[0]] if below.size else t[-1]
    else:
        t_start, t_end = window
    if period is not None and t_end - t_start < MIN_WINDOW_PERIODS * period:
        raise ValueError(
            f"fit window [{t_start}, {t_end}] shorter than "
            f"{MIN_WINDOW_PERIODS} modulation periods"
        )

    mask = (t >= t_start) & (t <= t_end)
    if np.count_nonzero(mask) < 3:
        raise ValueError("fewer than 3 samples inside the fit window")
    if np.any(pop[mask] <= 0.0):
        raise ValueError("non-positive populations inside the fit window")

    tw = t[mask]
    logp = np.log(pop[mask])
    slope, intercept = np.polyfit(tw, logp, 1)
    resid = logp - (slope * tw + intercept)
    return DecayFit(
        rate=float(-slope),
        intercept=float(intercept),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        window=(float(t_start), float(t_end)),
    )
