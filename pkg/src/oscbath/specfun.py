"""Self-contained special functions for the sideband analytics.

Only the two functions the closed-form decay rates need: Bessel functions
of the first kind J_n, and the complete elliptic integral of the first
kind K(m).  K uses the *parameter* convention,

    K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2(theta)),

so that K(0) = pi/2.
"""

from __future__ import annotations

import math

from .quadrature import ConvergenceError

__all__ = ["bessel_j", "elliptic_k"]

_MAX_ORDER = 10**4
_MAX_ARG = 10**6

# crossover between Miller's downward recurrence and the Hankel
# asymptotic expansion; the asymptotic P/Q series reach machine
# precision well before this point
_ASYMPTOTIC_X = 50.0


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind, J_n(x).

    Downward (Miller) recurrence with normalisation when the order
    competes with the argument; Hankel asymptotics plus stable upward
    recurrence for large arguments.  Absolute error below 1e-12 for
    n <= 1e4 and |x| <= 1e6.  Negative orders use J_{-n} = (-1)^n J_n.
    """
    n = int(n)
    x = float(x)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x < 0.0:
        x = -x
        if n % 2:
            sign = -sign
    if n > _MAX_ORDER or x > _MAX_ARG:
        raise ValueError(f"bessel_j supports n <= {_MAX_ORDER}, |x| <= {_MAX_ARG}")
    if x == 0.0:
        return sign if n == 0 else 0.0
    if x > _ASYMPTOTIC_X and n <= x:
        return sign * _bessel_upward(n, x)
    return sign * _bessel_miller(n, x)


def _bessel_miller(n: int, x: float) -> float:
    """Miller's algorithm: recurse downward from a start order well above
    both n and x, then normalise with J_0 + 2 sum_k J_{2k} = 1."""
    top = max(n, x)
    m_start = int(top + 4.0 * math.sqrt(top + 40.0) + 42.0)
    if m_start % 2:
        m_start += 1

    j_up = 0.0          # J_{m+1}
    j_cur = 1e-30       # J_m, arbitrary seed
    norm = 2.0 * j_cur if m_start % 2 == 0 else 0.0
    result = j_cur if n == m_start else 0.0
    for m in range(m_start, 0, -1):
        j_down = (2.0 * m / x) * j_cur - j_up  # J_{m-1}
        j_up = j_cur
        j_cur = j_down
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_up *= 1e-250
            norm *= 1e-250
            result *= 1e-250
        idx = m - 1
        if idx == n:
            result = j_cur
        if idx > 0 and idx % 2 == 0:
            norm += 2.0 * j_cur
    norm += j_cur  # j_cur is now J_0
    return result / norm


def _hankel_pq(nu: int, x: float) -> tuple[float, float]:
    """P and Q series of the Hankel asymptotic expansion of J_nu."""
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    for k in range(1, 40):
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
        if abs(term) < 1e-17:
            break
    return p, q


def _bessel_upward(n: int, x: float) -> float:
    """J_0, J_1 from asymptotics, then upward recurrence (stable for n < x)."""
    amp = math.sqrt(2.0 / (math.pi * x))
    p0, q0 = _hankel_pq(0, x)
    chi0 = x - 0.25 * math.pi
    j_prev = amp * (p0 * math.cos(chi0) - q0 * math.sin(chi0))  # J_0
    if n == 0:
        return j_prev
    p1, q1 = _hankel_pq(1, x)
    chi1 = x - 0.75 * math.pi
    j_cur = amp * (p1 * math.cos(chi1) - q1 * math.sin(chi1))  # J_1
    for m in range(1, n):
        j_cur, j_prev = (2.0 * m / x) * j_cur - j_prev, j_cur
    return j_cur


def _agm(a: float, b: float, tol: float = 4e-16) -> tuple[float, int]:
    """Arithmetic-geometric mean with iteration count."""
    iters = 0
    gap = abs(a - b)
    while gap > tol * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        iters += 1
        new_gap = abs(a - b)
        if new_gap >= gap:  # stuck at the last ulp
            break
        gap = new_gap
        if iters > 64:
            raise ConvergenceError("AGM failed to converge")
    return a, iters


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter convention.

    K(m) = pi / (2 AGM(1, sqrt(1 - m))).  Relative error below 1e-12 on
    [0, 1); m >= 1 is a domain error (logarithmic divergence at m = 1).
    """
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise ValueError("elliptic_k requires 0 <= m < 1")
    agm, _ = _agm(1.0, math.sqrt(1.0 - m))
    return math.pi / (2.0 * agm)
