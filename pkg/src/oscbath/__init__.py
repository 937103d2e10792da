"""Numerical laboratory for spontaneous-emission control via oscillating
reservoir mode-structures.

A two-level atom couples to a discretized reservoir whose mode
frequencies oscillate rigidly under a static Lorentzian envelope.  The
package provides the direct amplitude-equation simulation, the analytic
Fourier-sideband decay rates and their ultrafast closed form, the rival
variable-detuning model, occupation spectra with sideband peak analysis,
and a batch CLI that writes CSV/JSON artifacts.

All frequencies are angular and measured in units of the Lorentzian
half-width gamma (gamma = 1 internally); mode frequencies are stored as
detunings from the atomic transition.
"""

from .bath import (
    DiscreteBath,
    GridSpec,
    ReservoirSpec,
    build_bath,
    build_flat_bath,
    coupling_at,
    couplings,
    default_grid,
)
from .fitting import DecayFit, fit_decay_rate
from .phase import (
    ModulationShape,
    ModulationSpec,
    PhaseCoefficients,
    fourier_coefficients,
    modulation_value,
    phase_integral,
)
from .propagator import SimConfig, SimResult, default_dt, excited_population, propagate
from .quadrature import ConvergenceError, periodic_trapezoid
from .rates import (
    DetuningRates,
    RateBreakdown,
    RateMethod,
    Validity,
    bessel_sum_rate,
    detuning_rates,
    markov_validity,
    memory_kernel,
    sideband_rate,
    static_rate,
    suppression_ratio,
    total_rate,
    ultrafast_rate,
)
from .specfun import bessel_j, elliptic_k
from .spectrum import (
    LorentzFit,
    PeakRow,
    PeakTable,
    Spectrum,
    analytic_spectrum,
    fit_lorentzian,
    occupation_spectrum,
    peak_weights,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DecayFit",
    "DetuningRates",
    "DiscreteBath",
    "GridSpec",
    "LorentzFit",
    "ModulationShape",
    "ModulationSpec",
    "PeakRow",
    "PeakTable",
    "PhaseCoefficients",
    "RateBreakdown",
    "RateMethod",
    "ReservoirSpec",
    "SimConfig",
    "SimResult",
    "Spectrum",
    "Validity",
    "analytic_spectrum",
    "bessel_j",
    "bessel_sum_rate",
    "build_bath",
    "build_flat_bath",
    "coupling_at",
    "couplings",
    "default_dt",
    "default_grid",
    "detuning_rates",
    "elliptic_k",
    "excited_population",
    "fit_decay_rate",
    "fit_lorentzian",
    "fourier_coefficients",
    "markov_validity",
    "memory_kernel",
    "modulation_value",
    "occupation_spectrum",
    "peak_weights",
    "periodic_trapezoid",
    "phase_integral",
    "propagate",
    "sideband_rate",
    "static_rate",
    "suppression_ratio",
    "total_rate",
    "ultrafast_rate",
]
