"""Tests for the decay-rate fitter."""

import numpy as np
import pytest

from oscbath.fitting import DecayFit, fit_decay_rate


def synthetic(rate=0.05, t_max=200.0, n=2001, ripple=0.0, period=1.0):
    t = np.linspace(0.0, t_max, n)
    pop = np.exp(-rate * t) * (1.0 + ripple * np.sin(2 * np.pi * t / period))
    return np.column_stack((t, pop))


def test_exact_exponential():
    fit = fit_decay_rate(synthetic(rate=0.05), window=(0.0, 200.0))
    assert fit.rate == pytest.approx(0.05, rel=1e-12)
    assert fit.rms_residual < 1e-12


def test_default_window_skips_transient():
    series = synthetic(rate=0.05, t_max=300.0)
    # corrupt the early samples with a fake transient
    series[series[:, 0] < 3.0, 1] *= 0.7
    fit = fit_decay_rate(series, period=2.0)
    assert fit.window[0] == pytest.approx(6.0)  # 3 periods
    assert fit.rate == pytest.approx(0.05, rel=1e-6)


def test_window_ends_at_pop_floor():
    series = synthetic(rate=0.1, t_max=300.0)
    fit = fit_decay_rate(series, period=2.0, pop_floor=1e-3)
    t_floor = np.log(1e3) / 0.1
    assert fit.window[1] == pytest.approx(t_floor, abs=0.5)


def test_ripple_averages_out():
    fit = fit_decay_rate(
        synthetic(rate=0.05, ripple=0.05, period=1.3), period=1.3
    )
    assert fit.rate == pytest.approx(0.05, rel=1e-2)


def test_short_window_rejected():
    with pytest.raises(ValueError, match="periods"):
        fit_decay_rate(synthetic(), window=(0.0, 3.0), period=1.0)


def test_nonpositive_population_rejected():
    series = synthetic()
    series[-5, 1] = 0.0
    with pytest.raises(ValueError, match="non-positive"):
        fit_decay_rate(series, window=(0.0, 200.0))


def test_needs_window_or_period():
    with pytest.raises(ValueError):
        fit_decay_rate(synthetic())


def test_bad_shape():
    with pytest.raises(ValueError):
        fit_decay_rate(np.zeros((3, 3)), window=(0.0, 1.0))
