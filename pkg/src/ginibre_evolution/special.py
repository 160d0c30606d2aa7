"""Scalar special functions used by the closed-form and quadrature code."""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericalFailure, require

_SQRT_PI = math.sqrt(math.pi)
_EPS = 2.0**-53


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!; every term positive.
    term = x
    total = [x]
    x2 = x * x
    n = 0
    while abs(term) > _EPS * 1e-3 * abs(x):
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total.append(term)
    return 2.0 / _SQRT_PI * math.exp(-x2) * math.fsum(total)


def _erfc_fraction(x: float) -> float:
    # erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 5000):
        a = 0.5 * k
        d = x + a * d
        d = tiny if d == 0.0 else d
        c = x + a / c
        c = tiny if c == 0.0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x * x) / (_SQRT_PI * f)
    raise NumericalFailure(f"erfc continued fraction did not converge at x={x!r}")


def erfc(x: float) -> float:
    """Complementary error function, to about 1e-15 relative for x >= 0."""
    x = float(x)
    if math.isnan(x):
        return math.nan
    if x < 0:
        return 2.0 - erfc(-x)
    if x > 27.3:
        return 0.0
    if x < 2.0:
        return 1.0 - _erf_series(x)
    return _erfc_fraction(x)


erfc_array = np.vectorize(erfc, otypes=[float])


def _tail_first_log(n: int, a: float) -> float:
    return (n + 1) * math.log(abs(a)) - math.lgamma(n + 2)


def exp_poly_ratio(n: int, z: float) -> float:
    """Truncated exponential series ``sum_{k=0}^n z^k / k!``.

    Terms are generated by the ratio recurrence and summed with ``math.fsum``.
    For negative ``z`` the alternating series can cancel badly; then the
    complementary form ``e^z - sum_{k>n} z^k/k!`` is used whenever its
    rounding bound is the smaller of the two.
    """
    require(isinstance(n, (int, np.integer)) and n >= 0, "n must be a nonnegative integer")
    z = float(z)
    if z == 0.0:
        return 1.0
    if z < 0 and n + 1 > -z:
        direct_bound = -z  # log of sum |z|^k/k!
        tail_bound = max(z, _tail_first_log(n, z))
        if tail_bound < direct_bound:
            term = math.exp(_tail_first_log(n, z)) * (1 if (n + 1) % 2 == 0 else -1)
            tail = [term]
            k = n + 1
            while abs(term) > _EPS * 1e-3 * abs(tail[0]):
                k += 1
                term *= z / k
                tail.append(term)
            return math.exp(z) - math.fsum(tail)
    terms = [1.0]
    term = 1.0
    for k in range(1, n + 1):
        term *= z / k
        terms.append(term)
        if term == 0.0:
            break
    return math.fsum(terms)


def log_exp_poly_ratio(n: int, z: float):
    """``(sign, log|e_n(z)|)`` for arguments whose terms would overflow a double."""
    require(isinstance(n, (int, np.integer)) and n >= 0, "n must be a nonnegative integer")
    z = float(z)
    if z == 0.0:
        return 1, 0.0
    if abs(z) < 500.0:
        value = exp_poly_ratio(n, z)
        if value != 0.0 and math.isfinite(value):
            return (1 if value > 0 else -1), math.log(abs(value))
    k = np.arange(n + 1)
    logs = k * math.log(abs(z)) - np.array([math.lgamma(j + 1) for j in k])
    top = float(logs.max())
    scaled = np.exp(logs - top)
    if z < 0:
        scaled = np.where(k % 2 == 1, -scaled, scaled)
    total = math.fsum(scaled)
    if total == 0.0:
        return 0, -math.inf
    return (1 if total > 0 else -1), top + math.log(abs(total))


def log_sphere_area(k: int) -> float:
    """``log |S_k|`` for the unit sphere ``S_k`` in ``R^{k+1}``: ``2 pi^{(k+1)/2} / Gamma((k+1)/2)``."""
    require(k >= 0, "sphere dimension must be nonnegative")
    h = 0.5 * (k + 1)
    return math.log(2.0) + h * math.log(math.pi) - math.lgamma(h)
