"""Oracle tests for the self-contained special functions.

Primary oracles are independent of the implementation: a power series
for small-argument Bessel values, trapezoid quadrature of the defining
integrals, and the logarithmic asymptote of K near m = 1.  scipy.special
serves as a secondary cross-check oracle.
"""

import math

import numpy as np
from scipy.integrate import trapezoid
import pytest
import scipy.special

from oscbath.specfun import _agm, bessel_j, elliptic_k

J0_FIRST_ZERO = 2.404825557695773


def bessel_series(n, x, terms=60):
    """Ascending power series for J_n, accurate for |x| <~ 20."""
    total = 0.0
    term = (0.5 * x) ** n / math.factorial(n)
    for k in range(terms):
        total += term
        term *= -(0.25 * x * x) / ((k + 1) * (n + k + 1))
    return total


def elliptic_quadrature(m, n=200001):
    theta = np.linspace(0.0, 0.5 * math.pi, n)
    return trapezoid(1.0 / np.sqrt(1.0 - m * np.sin(theta) ** 2), theta)


class TestBessel:
    def test_first_zero(self):
        assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-12

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
    @pytest.mark.parametrize("x", [0.1, 1.0, 3.7, 10.0])
    def test_against_power_series(self, n, x):
        # the alternating series loses ~I_0(x) * eps to cancellation,
        # which stays below 1e-11 for x <= 10
        assert bessel_j(n, x) == pytest.approx(bessel_series(n, x), abs=1e-11)

    @pytest.mark.parametrize(
        "n,x",
        [
            (0, 55.0),
            (3, 100.0),
            (40, 60.0),
            (100, 3.0),
            (500, 480.0),
            (1000, 999.5),
            (0, 1e5),
            (2, 1e6),
        ],
    )
    def test_against_scipy(self, n, x):
        assert bessel_j(n, x) == pytest.approx(scipy.special.jv(n, x), abs=1e-12)

    def test_negative_order_and_argument(self):
        for n in (1, 2, 7):
            for x in (3.0, 12.5):
                assert bessel_j(-n, x) == pytest.approx(
                    (-1) ** n * bessel_j(n, x), abs=1e-15
                )
                assert bessel_j(n, -x) == pytest.approx(
                    (-1) ** n * bessel_j(n, x), abs=1e-15
                )

    def test_parseval(self):
        # sum_n J_n(x)^2 = 1 for any x
        for x in (0.5, 7.3, 31.0):
            total = sum(bessel_j(n, x) ** 2 for n in range(-60, 61))
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_x_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(3, 0.0) == 0.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bessel_j(10**4 + 1, 1.0)
        with pytest.raises(ValueError):
            bessel_j(0, 2e6)


class TestEllipticK:
    def test_endpoints(self):
        assert elliptic_k(0.0) == pytest.approx(0.5 * math.pi, abs=1e-15)

    @pytest.mark.parametrize("m", [0.1, 0.5, 0.9, 0.99])
    def test_against_quadrature(self, m):
        assert elliptic_k(m) == pytest.approx(elliptic_quadrature(m), rel=1e-10)

    @pytest.mark.parametrize("m", [0.0, 0.3, 0.7, 0.999999, 1 - 1e-12])
    def test_against_scipy(self, m):
        assert elliptic_k(m) == pytest.approx(scipy.special.ellipk(m), rel=1e-12)

    def test_logarithmic_asymptote(self):
        # K(m) -> ln(4 / sqrt(1-m)) as m -> 1
        m = 1.0 - 1e-10
        asym = math.log(4.0 / math.sqrt(1.0 - m))
        assert elliptic_k(m) == pytest.approx(asym, rel=1e-9)

    def test_domain_errors(self):
        for m in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError):
                elliptic_k(m)

    def test_agm_iteration_count(self):
        # quadratic convergence: machine precision in at most 8 steps
        for m in (0.5, 0.99, 1 - 1e-12):
            _, iters = _agm(1.0, math.sqrt(1.0 - m))
            assert iters <= 8
