"""Tests for the direct amplitude-equation propagator.

Anchors: norm conservation, the flat-reservoir golden rule, the static
weak-coupling rate, step-halving convergence, and exact agreement with a
dense scipy integration of the same equations on a tiny bath.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from oscbath.bath import GridSpec, ReservoirSpec, build_bath, build_flat_bath, couplings
from oscbath.fitting import fit_decay_rate
from oscbath.phase import ModulationSpec, modulation_value
from oscbath.propagator import (
    SimConfig,
    default_dt,
    excited_population,
    propagate,
)
from oscbath.rates import static_rate

WEAK = ReservoirSpec(omega0=1000.0, gamma=1.0, weight=0.1)


def small_bath():
    mod = ModulationSpec.sinusoid(depth=2.0, omega_mod=3.0)
    return build_bath(WEAK, mod, GridSpec(half_window=13.0, spacing=0.25))


class TestConfigValidation:
    def test_bad_params(self):
        for kwargs in (
            dict(t_final=0.0, dt=0.1),
            dict(t_final=1.0, dt=-0.1),
            dict(t_final=1.0, dt=0.1, store_stride=0),
            dict(t_final=1.0, dt=0.1, integrator="euler"),
        ):
            with pytest.raises(ValueError):
                SimConfig(**kwargs)

    def test_recurrence_guard(self):
        bath = small_bath()
        cfg = SimConfig(t_final=bath.recurrence_time, dt=1e-3)
        with pytest.raises(ValueError, match="recurrence"):
            propagate(bath, cfg)

    def test_dt_bound(self):
        bath = small_bath()
        cfg = SimConfig(t_final=1.0, dt=0.05)  # dt (W + d) = 0.75 > 0.1
        with pytest.raises(ValueError, match="dt"):
            propagate(bath, cfg)


class TestAgainstDenseSolver:
    def test_matches_scipy_on_tiny_bath(self):
        # interaction-picture equations solved by RK45 at tight tolerance
        res = ReservoirSpec(omega0=1000.0, gamma=1.0, weight=0.3)
        mod = ModulationSpec.sinusoid(depth=1.5, omega_mod=2.0)
        bath = build_bath(res, mod, GridSpec(half_window=12.0, spacing=0.5))
        t_final = 4.0

        delta = bath.detunings

        def rhs(t, y):
            c = y[: bath.n_modes + 1] + 1j * y[bath.n_modes + 1 :]
            ca, ck = c[0], c[1:]
            g = couplings(bath, t)
            from oscbath.phase import phase_integral

            phi = delta * t + phase_integral(bath.modulation, 0.0, t)
            dca = -1j * np.sum(g * np.exp(-1j * phi) * ck)
            dck = -1j * g * np.exp(1j * phi) * ca
            d = np.concatenate(([dca], dck))
            return np.concatenate((d.real, d.imag))

        y0 = np.zeros(2 * (bath.n_modes + 1))
        y0[0] = 1.0
        sol = solve_ivp(
            rhs, (0.0, t_final), y0, rtol=1e-10, atol=1e-12, dense_output=False
        )
        ref = sol.y[: bath.n_modes + 1, -1] + 1j * sol.y[bath.n_modes + 1 :, -1]

        run = propagate(bath, SimConfig(t_final=t_final, dt=default_dt(bath)))
        assert abs(run.c_a[-1] - ref[0]) < 1e-6
        assert np.max(np.abs(run.final_ck - ref[1:])) < 1e-6


class TestPhysics:
    def test_norm_conserved(self):
        bath = small_bath()
        run = propagate(bath, SimConfig(t_final=5.0, dt=default_dt(bath)))
        assert run.norm_drift < 1e-8

    def test_flat_golden_rule_invariance(self):
        level = 0.02
        grid = GridSpec(half_window=25.0, spacing=0.05)
        rates = {}
        for name, mod in (
            ("static", ModulationSpec.none()),
            ("modulated", ModulationSpec.sinusoid(depth=8.0, omega_mod=5.0)),
        ):
            flat = build_flat_bath(level, mod, grid)
            cfg = SimConfig(t_final=40.0, dt=default_dt(flat), store_stride=50)
            run = propagate(flat, cfg)
            rates[name] = fit_decay_rate(
                excited_population(run), period=2.0 * math.pi / 5.0
            ).rate
        expected = 2.0 * math.pi * level
        assert rates["static"] == pytest.approx(expected, rel=2e-2)
        # modulation leaves the flat-bath rate unchanged
        assert rates["modulated"] == pytest.approx(rates["static"], rel=5e-3)

    def test_static_weak_coupling_rate(self):
        bath = build_bath(
            WEAK, ModulationSpec.none(), GridSpec(half_window=10.0, spacing=0.01)
        )
        cfg = SimConfig(t_final=250.0, dt=default_dt(bath), store_stride=100)
        run = propagate(bath, cfg)
        fit = fit_decay_rate(excited_population(run), window=(5.0, 250.0))
        assert fit.rate == pytest.approx(static_rate(WEAK), rel=2e-2)

    def test_step_halving(self):
        bath = small_bath()
        runs = []
        for dt in (default_dt(bath), 0.5 * default_dt(bath)):
            runs.append(propagate(bath, SimConfig(t_final=5.0, dt=dt)))
        assert abs(
            abs(runs[0].c_a[-1]) ** 2 - abs(runs[1].c_a[-1]) ** 2
        ) < 1e-9

    def test_final_ck_phase_reconstruction(self):
        # total probability in atom + modes is 1
        bath = small_bath()
        run = propagate(bath, SimConfig(t_final=5.0, dt=default_dt(bath)))
        total = abs(run.c_a[-1]) ** 2 + np.sum(np.abs(run.final_ck) ** 2)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_store_stride(self):
        bath = small_bath()
        dense = propagate(bath, SimConfig(t_final=5.0, dt=default_dt(bath)))
        sparse = propagate(
            bath, SimConfig(t_final=5.0, dt=default_dt(bath), store_stride=37)
        )
        assert sparse.times[-1] == pytest.approx(dense.times[-1])
        assert sparse.c_a[-1] == pytest.approx(dense.c_a[-1])
        assert sparse.times.size < dense.times.size
        # stored samples coincide with the dense run
        for t, c in zip(sparse.times, sparse.c_a):
            i = np.argmin(np.abs(dense.times - t))
            assert c == pytest.approx(dense.c_a[i])


def test_excited_population_shape():
    bath = small_bath()
    run = propagate(bath, SimConfig(t_final=2.0, dt=default_dt(bath)))
    series = excited_population(run)
    assert series.shape == (run.times.size, 2)
    assert series[0, 1] == pytest.approx(1.0)
