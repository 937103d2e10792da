"""Periodic frequency modulation of the reservoir modes.

Evaluation of the modulation waveform f(t), its running phase integral,
and the Fourier sideband coefficients of the accumulated phase factor
exp(-i int_0^t f(tau) dtau) = sum_n F_n exp(-i n Omega t).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import MAX_POINTS, ConvergenceError

__all__ = [
    "ModulationShape",
    "ModulationSpec",
    "PhaseCoefficients",
    "modulation_value",
    "phase_integral",
    "fourier_coefficients",
    "default_n_max",
]


class ModulationShape(enum.Enum):
    NONE = "none"
    SINUSOID = "sinusoid"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class ModulationSpec:
    """Periodic modulation f(t) applied identically to every mode frequency.

    ``depth`` is half the peak-to-peak excursion, (f_max - f_min)/2;
    ``omega_mod`` is the angular modulation frequency.  A tabulated shape
    lists (phase-fraction, value) pairs over one period, first value equal
    to the last, and is evaluated by periodic cubic interpolation.
    """

    shape: ModulationShape
    depth: float = 0.0
    omega_mod: float = 0.0
    table: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.shape is not ModulationShape.NONE and self.omega_mod <= 0.0:
            raise ValueError("omega_mod must be positive for a periodic modulation")
        if self.depth < 0.0:
            raise ValueError("modulation depth must be non-negative")
        if self.shape is ModulationShape.TABULATED:
            if self.table is None or len(self.table) < 3:
                raise ValueError("tabulated modulation needs at least 3 table rows")
            table = tuple((float(a), float(b)) for a, b in self.table)
            object.__setattr__(self, "table", table)
            fracs = np.array([row[0] for row in table])
            vals = np.array([row[1] for row in table])
            if fracs[0] != 0.0 or fracs[-1] != 1.0 or np.any(np.diff(fracs) <= 0):
                raise ValueError("table phase-fractions must increase from 0 to 1")
            if vals[0] != vals[-1]:
                raise ValueError("tabulated modulation must be periodic (first value = last value)")
            span = 0.5 * (vals.max() - vals.min())
            if self.depth == 0.0:
                object.__setattr__(self, "depth", float(span))
            elif abs(self.depth - span) > 1e-8 * max(span, 1.0):
                raise ValueError("depth inconsistent with tabulated values")
        else:
            if self.table is not None:
                raise ValueError("table is only meaningful for the tabulated shape")
            if self.shape is ModulationShape.NONE and self.depth != 0.0:
                raise ValueError("depth must be zero without a modulation")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_mod

    @classmethod
    def none(cls) -> "ModulationSpec":
        return cls(ModulationShape.NONE)

    @classmethod
    def sinusoid(cls, depth: float, omega_mod: float) -> "ModulationSpec":
        return cls(ModulationShape.SINUSOID, depth=depth, omega_mod=omega_mod)

    @classmethod
    def tabulated(
        cls, table: Sequence[Tuple[float, float]], omega_mod: float
    ) -> "ModulationSpec":
        return cls(ModulationShape.TABULATED, omega_mod=omega_mod, table=tuple(table))


# periodic spline and its antiderivative, cached per (table, omega_mod)
_SPLINE_CACHE: dict = {}


def _interp(spec: ModulationSpec):
    key = (spec.table, spec.omega_mod)
    hit = _SPLINE_CACHE.get(key)
    if hit is None:
        period = spec.period
        x = np.array([row[0] for row in spec.table]) * period
        y = np.array([row[1] for row in spec.table])
        spline = CubicSpline(x, y, bc_type="periodic")
        anti = spline.antiderivative()
        hit = (spline, anti, float(anti(period)))
        _SPLINE_CACHE[key] = hit
    return hit


def modulation_value(spec: ModulationSpec, t):
    """The modulation f(t); scalar in, scalar out (arrays broadcast)."""
    t = np.asarray(t, dtype=float)
    if spec.shape is ModulationShape.NONE:
        out = np.zeros_like(t)
    elif spec.shape is ModulationShape.SINUSOID:
        out = spec.depth * np.sin(spec.omega_mod * t)
    else:
        spline, _, _ = _interp(spec)
        out = spline(np.mod(t, spec.period))
    return out if out.ndim else float(out)


def phase_integral(spec: ModulationSpec, t1, t2):
    """int_{t1}^{t2} f(tau) dtau, in radians.

    Closed form for the sinusoid; the spline's analytic antiderivative for
    tabulated shapes (no accumulated quadrature drift over many periods).
    """
    if spec.shape is ModulationShape.NONE:
        res = np.zeros(np.broadcast(np.asarray(t1), np.asarray(t2)).shape)
        return res if res.ndim else 0.0
    if spec.shape is ModulationShape.SINUSOID:
        w = spec.omega_mod
        out = (spec.depth / w) * (np.cos(w * np.asarray(t1, dtype=float))
                                  - np.cos(w * np.asarray(t2, dtype=float)))
        return out if np.ndim(out) else float(out)
    _, anti, per_integral = _interp(spec)
    period = spec.period

    def running(t):
        t = np.asarray(t, dtype=float)
        cycles = np.floor(t / period)
        return cycles * per_integral + anti(t - cycles * period)

    out = running(t2) - running(t1)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class PhaseCoefficients:
    """Fourier coefficients F_n of exp(-i int_0^t f), |n| <= n_max."""

    n_max: int
    coeffs: dict
    omega_mod: float

    def __getitem__(self, n: int) -> complex:
        return self.coeffs.get(n, 0.0 + 0.0j)

    @property
    def power_sum(self) -> float:
        """sum |F_n|^2; approaches 1 from below as n_max grows."""
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def reconstruct(self, t):
        """sum_n F_n exp(-i n Omega t), the truncated phase factor."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.exp(-1j * n * self.omega_mod * t)
        return out if out.ndim else complex(out)


def default_n_max(spec: ModulationSpec) -> int:
    """Truncation order ceil(d/Omega) + 12; J_n(d/Omega) decays
    super-exponentially beyond n = d/Omega."""
    if spec.shape is ModulationShape.NONE or spec.depth == 0.0:
        return 0
    return math.ceil(spec.depth / spec.omega_mod) + 12


def fourier_coefficients(spec: ModulationSpec, n_max: Optional[int] = None) -> PhaseCoefficients:
    """Sideband coefficients F_n by periodic trapezoid quadrature (FFT),
    point-doubling until successive coefficient sets agree to 1e-12."""
    if spec.shape is ModulationShape.NONE:
        nm = 0 if n_max is None else int(n_max)
        coeffs = {n: (1.0 + 0.0j if n == 0 else 0.0 + 0.0j) for n in range(-nm, nm + 1)}
        return PhaseCoefficients(nm, coeffs, spec.omega_mod)
    if n_max is None:
        n_max = default_n_max(spec)
    n_max = int(n_max)
    floor = math.ceil(spec.depth / spec.omega_mod) + 8
    if n_max < floor:
        raise ValueError(f"n_max must be at least ceil(d/Omega) + 8 = {floor}")

    period = spec.period
    # a nonzero waveform mean is a secular phase drift: the phase factor
    # is then not Omega-periodic and has no sideband expansion.  Such an
    # offset is a carrier-frequency shift and must be folded into omega0.
    drift = float(phase_integral(spec, 0.0, period))
    if abs(drift) > 1e-9 * max(1.0, spec.depth * period):
        raise ValueError(
            f"waveform mean {drift / period:.3e} is nonzero; fold the static "
            "offset into the carrier frequency before expanding"
        )
    m = 64
    while m < 4 * (n_max + 1):
        m *= 2
    prev = None
    while m <= MAX_POINTS:
        t = np.arange(m) * (period / m)
        values = np.exp(-1j * phase_integral(spec, 0.0, t))
        fhat = np.fft.fft(values) / m
        # with the e^{-i n Omega t} convention, F_n sits at FFT bin -n
        current = fhat[np.mod(-np.arange(-n_max, n_max + 1), m)]
        if prev is not None and np.max(np.abs(current - prev)) < 1e-12:
            ns = range(-n_max, n_max + 1)
            coeffs = {n: complex(current[i]) for i, n in enumerate(ns)}
            return PhaseCoefficients(n_max, coeffs, spec.omega_mod)
        prev = current
        m *= 2
    raise ConvergenceError("Fourier coefficients did not converge within 2^18 points")
