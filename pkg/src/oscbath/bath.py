"""Domain types for the atom-reservoir system and construction of the
discretized bath.

The reservoir structure function rho |g|^2 is a static Lorentzian of
half-width gamma and weight D^2, centred on the atomic transition; mode
frequencies are shifted rigidly by the modulation f(t) while the envelope
stays put, so individual couplings g_k(t) change in time.  Frequencies
are stored internally as detunings from the atomic transition omega0;
omega0 is kept only for I/O labelling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .phase import ModulationSpec, modulation_value

__all__ = [
    "ReservoirSpec",
    "GridSpec",
    "DiscreteBath",
    "build_bath",
    "build_flat_bath",
    "default_grid",
    "coupling_at",
    "couplings",
]

# resonance must never approach the grid edge closer than this many
# Lorentzian widths
WINDOW_MARGIN_WIDTHS = 10.0


@dataclass(frozen=True)
class ReservoirSpec:
    """Lorentzian reservoir: transition frequency omega0, half-width gamma,
    coupling weight D (sum_k g_k^2 = D^2)."""

    omega0: float
    gamma: float
    weight: float

    def __post_init__(self):
        if self.omega0 <= 0.0:
            raise ValueError("omega0 must be positive")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.weight <= 0.0:
            raise ValueError("coupling weight must be positive")

    def structure(self, detuning):
        """rho g^2 at a given detuning from the transition."""
        d2g = self.weight**2 * self.gamma / math.pi
        return d2g / (self.gamma**2 + np.asarray(detuning) ** 2)


@dataclass(frozen=True)
class GridSpec:
    """Uniform mode grid spanning omega0 +/- half_window; the mode count
    2 floor(W/dw) + 1 is odd so one mode sits exactly on resonance."""

    half_window: float
    spacing: float

    def __post_init__(self):
        if self.spacing <= 0.0:
            raise ValueError("grid spacing must be positive")
        if self.half_window < self.spacing:
            raise ValueError("half_window must be at least one grid spacing")

    @property
    def n_modes(self) -> int:
        return 2 * int(self.half_window / self.spacing) + 1


@dataclass(eq=False)
class DiscreteBath:
    """Discretized bath with uniform density of states rho = 1/spacing.

    ``flat_level`` switches the envelope to a constant rho g^2 (the
    structureless reservoir used for golden-rule diagnostics); otherwise
    the envelope is the Lorentzian of ``reservoir``.  Immutable after
    construction; safe to share across workers.
    """

    reservoir: Optional[ReservoirSpec]
    modulation: ModulationSpec
    omega0: float
    detunings: np.ndarray = field(repr=False)
    density: float
    flat_level: Optional[float] = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.detunings, dtype=float)
        arr.setflags(write=False)
        self.detunings = arr

    @property
    def n_modes(self) -> int:
        return self.detunings.size

    @property
    def spacing(self) -> float:
        return 1.0 / self.density

    @property
    def half_window(self) -> float:
        return float(self.detunings[-1])

    @property
    def initial_freqs(self) -> np.ndarray:
        return self.omega0 + self.detunings

    @property
    def recurrence_time(self) -> float:
        """Poincare revival time of the uniform discrete bath, 2 pi / spacing."""
        return 2.0 * math.pi * self.density

    def envelope(self, detuning):
        """rho g^2 evaluated at detuning(s) from the transition."""
        if self.flat_level is not None:
            return np.broadcast_to(self.flat_level, np.shape(detuning)).copy() \
                if np.ndim(detuning) else self.flat_level
        return self.reservoir.structure(detuning)

    @property
    def weight_sum(self) -> float:
        """sum_k g_k(0)^2."""
        return float(np.sum(self.envelope(self.detunings)) * self.spacing)


def default_grid(reservoir: ReservoirSpec, modulation: ModulationSpec) -> GridSpec:
    """Default discretization: spacing gamma/100; window covering the
    resonance sweep plus every sideband with non-negligible weight
    (|n| <= ceil(d/Omega) + 2, beyond which J_n(d/Omega) collapses)."""
    gamma = reservoir.gamma
    d = modulation.depth
    if modulation.omega_mod > 0.0 and d > 0.0:
        n_cut = math.ceil(d / modulation.omega_mod) + 2
        sideband_span = n_cut * modulation.omega_mod
    else:
        sideband_span = 0.0
    half_window = d + WINDOW_MARGIN_WIDTHS * gamma + sideband_span
    return GridSpec(half_window=half_window, spacing=gamma / 100.0)


def build_bath(
    reservoir: ReservoirSpec, modulation: ModulationSpec, grid: GridSpec
) -> DiscreteBath:
    """Discretize the Lorentzian reservoir on a uniform grid.

    Rejects windows too small for the modulation (the resonance would
    sweep off-grid) and spacings that fail to resolve the envelope.
    """
    gamma = reservoir.gamma
    if grid.spacing >= gamma:
        raise ValueError(
            f"grid spacing {grid.spacing} must be below gamma={gamma} "
            "to resolve the envelope"
        )
    margin = modulation.depth + WINDOW_MARGIN_WIDTHS * gamma
    if grid.half_window < margin:
        raise ValueError(
            f"half_window {grid.half_window} below depth + "
            f"{WINDOW_MARGIN_WIDTHS} gamma = {margin}; resonance would "
            "approach the grid edge"
        )
    half_n = int(grid.half_window / grid.spacing)
    detunings = grid.spacing * np.arange(-half_n, half_n + 1)
    bath = DiscreteBath(
        reservoir=reservoir,
        modulation=modulation,
        omega0=reservoir.omega0,
        detunings=detunings,
        density=1.0 / grid.spacing,
    )
    # window-truncation sanity: the missing Lorentzian tail mass is 2 gamma/(pi W)
    total = bath.weight_sum
    d2 = reservoir.weight**2
    eps_win = 2.0 * gamma / (math.pi * grid.half_window)
    if not d2 * (1.0 - eps_win) <= total <= d2 * (1.0 + 1e-12):
        raise ValueError(
            f"coupling weight sum {total} outside [{d2 * (1 - eps_win)}, {d2}]"
        )
    return bath


def build_flat_bath(
    level: float,
    modulation: ModulationSpec,
    grid: GridSpec,
    omega0: float = 1000.0,
) -> DiscreteBath:
    """Structureless reservoir, rho g^2 = level everywhere on the grid.

    Diagnostic bath for the golden-rule invariance check: the decay rate
    must equal 2 pi level whatever the modulation.
    """
    if level <= 0.0:
        raise ValueError("flat envelope level must be positive")
    half_n = int(grid.half_window / grid.spacing)
    detunings = grid.spacing * np.arange(-half_n, half_n + 1)
    return DiscreteBath(
        reservoir=None,
        modulation=modulation,
        omega0=omega0,
        detunings=detunings,
        density=1.0 / grid.spacing,
        flat_level=level,
    )


def coupling_at(bath: DiscreteBath, k: int, t: float) -> float:
    """Coupling g_k(t) of mode k; real and positive by convention."""
    if not 0 <= k < bath.n_modes:
        raise IndexError(f"mode index {k} out of range [0, {bath.n_modes})")
    f_t = modulation_value(bath.modulation, t)
    return float(np.sqrt(bath.envelope(bath.detunings[k] + f_t) * bath.spacing))


def couplings(bath: DiscreteBath, t: float) -> np.ndarray:
    """All couplings g_k(t) at once."""
    f_t = modulation_value(bath.modulation, t)
    return np.sqrt(np.asarray(bath.envelope(bath.detunings + f_t)) * bath.spacing)
