"""Exact finite-N and large-N formulas for two-time real-eigenvalue statistics.

The central object is the *modified* two-time density: the joint density of a
real eigenvalue ``y`` of ``M_t`` and a real eigenvalue ``x`` of ``M_{t+tau}``,
each weighted by its right-limit spin.  At finite N it is a one-dimensional
integral over ``z in [0, 1]`` (the last coordinate of a unit hemisphere
vector); in the scaling limit ``tau = T / N`` it has a closed form whose
double antiderivative is the erfc spin correlation.

N-dependent constants (sphere areas, factorials, powers of 2 pi) are combined
as logarithms through ``lgamma`` so that N in the hundreds poses no overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, require
from .quadrature import QuadratureConfig, QuadResult, integrate
from .special import erfc, exp_poly_ratio, log_exp_poly_ratio, log_sphere_area

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class TwoTimeParams:
    """Dimension ``n``, first time ``t``, lag ``tau``, point ``y`` at ``t`` and ``x`` at ``t + tau``."""

    n: int
    t: float
    tau: float
    y: float
    x: float

    def __post_init__(self):
        require(isinstance(self.n, (int, np.integer)) and self.n >= 4, "n must be an integer >= 4")
        require(self.t > 0, "t must be positive")
        require(self.tau > 0, "tau must be positive")
        require(math.isfinite(self.x) and math.isfinite(self.y), "points must be finite")


@dataclass(frozen=True)
class ScaledLagParams:
    """Time ``t`` and scaled lag ``T = N * tau`` for the large-N limit."""

    t: float
    T: float
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self):
        require(self.t > 0, "t must be positive")
        require(self.T >= 0, "T must be nonnegative")


def _breakpoints(tau_over_t: float):
    # the integrand concentrates where 1 - z^2 is comparable to tau/t
    pts = []
    for c in (0.1, 1.0, 10.0):
        u = c * tau_over_t
        if u < 1.0:
            pts.append(math.sqrt(1.0 - u))
    return pts


def log_two_time_prefactor(n: int, t: float) -> float:
    """Log of ``2 |S_{N-1}| |S_{N-2}| (N-2)! / (t^2 (2 pi)^N)``.

    Mathematically this equals ``log(2 / (pi t^2))`` for every N; it is
    assembled term by term so the cancellation happens in log space.
    """
    return (math.log(2.0) + log_sphere_area(n - 1) + log_sphere_area(n - 2)
            + math.lgamma(n - 1) - n * math.log(2.0 * math.pi) - 2.0 * math.log(t))


def _two_time_integrand(p: TwoTimeParams):
    n, t, tau, x, y = p.n, p.t, p.tau, p.x, p.y
    a = 2.0 * x * y / t
    e2 = exp_poly_ratio(n - 2, a)
    e3 = exp_poly_ratio(n - 3, a)
    log_pref = log_two_time_prefactor(n, t)
    r = tau / t

    def f(z):
        z2 = z * z
        u = 1.0 - z2
        den = tau + t * u
        quad_form = x * x - 2.0 * z2 * x * y + y * y * (1.0 + r)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w = (0.5 * (n - 3)) * np.log(u) - 0.5 * n * np.log(r + u) - quad_form / den + log_pref
        w = np.where(u > 0, np.exp(log_w), 0.0)
        aa = x - y * u * (t + tau) / den
        bb = y - x * u * t / den
        c = t * tau * z2 / (2.0 * den)
        bracket = (aa * bb + (n - 1) * c) * e2 - c * a * e3
        return w * bracket

    return f


def modified_density_finite_n(p: TwoTimeParams, q: QuadratureConfig | None = None, full_output: bool = False):
    """Exact modified two-time density at finite N (one-dimensional quadrature)."""
    res = integrate(_two_time_integrand(p), 0.0, 1.0, q, _breakpoints(p.tau / p.t))
    return res if full_output else res.value


def c1_prefactor(n: int, t: float, T: float) -> float:
    """``(N-1)! |S_{N-1}| |S_{N-2}| T / ((2 pi)^N N t^2)``, assembled in log space."""
    log_c = (math.lgamma(n) + log_sphere_area(n - 1) + log_sphere_area(n - 2)
             - n * math.log(2.0 * math.pi) - math.log(n) - 2.0 * math.log(t))
    return math.exp(log_c) * T


def c1_limit(t: float, T: float) -> float:
    """Large-N value of :func:`c1_prefactor`: ``T / (pi t^2)``."""
    return T / (math.pi * t * t)


def modified_density_finite_n_y0(n: int, t: float, T: float, x: float,
                                 q: QuadratureConfig | None = None, full_output: bool = False):
    """Modified density at ``y = 0`` and lag ``T / N`` from its dedicated single-integral form."""
    require(isinstance(n, (int, np.integer)) and n >= 4, "n must be an integer >= 4")
    require(t > 0, "t must be positive")
    require(T > 0, "T must be positive")
    c1 = c1_prefactor(n, t, T)
    tau = T / n

    def f(z):
        z2 = z * z
        u = 1.0 - z2
        with np.errstate(divide="ignore", invalid="ignore"):
            log_w = -2.5 * np.log(u) - x * x / (tau + t * u) - (0.5 * n + 1.0) * np.log1p(tau / (t * u))
        w = np.where(u > 0, np.exp(log_w), 0.0)
        return w * (z2 - 2.0 * n * x * x * u / ((n - 1) * T))

    res = integrate(f, 0.0, 1.0, q, _breakpoints(tau / t))
    res = QuadResult(c1 * res.value, c1 * res.error, res.panels)
    return res if full_output else res.value


def modified_density_limit(t: float, T: float, x_minus_y: float) -> float:
    """Scaling-limit modified density as a function of the separation ``x - y``."""
    if not t > 0:
        raise InvalidArgumentError("t must be positive")
    if not T > 0:
        raise InvalidArgumentError("T must be positive; the T -> 0 limit has an atom, see zero_lag_smooth_part")
    d2 = x_minus_y * x_minus_y
    alpha = d2 / t + T / (2.0 * t)
    return (T / (2.0 * _SQRT_PI * t * t)) * math.exp(-alpha) * (
        0.5 * alpha**-1.5 - (2.0 * d2 / T) * alpha**-0.5)


def zero_lag_smooth_part(t: float, x: float) -> float:
    """Absolutely continuous part of the T -> 0 limit: ``-|x| e^{-x^2/t} / (sqrt(pi) t^{3/2})``."""
    require(t > 0, "t must be positive")
    return -abs(x) * math.exp(-x * x / t) / (_SQRT_PI * t**1.5)


def zero_lag_atom_weight(t: float) -> float:
    """Mass of the point mass at ``x = y`` in the T -> 0 limit: the density ``1/sqrt(pi t)``."""
    require(t > 0, "t must be positive")
    return 1.0 / math.sqrt(math.pi * t)


def spin_corr_limit(t: float, T: float, x: float, y: float) -> float:
    """Large-N two-time spin correlation ``erfc(sqrt((x - y)^2 / t + T / (2 t)))``."""
    if not t > 0:
        raise InvalidArgumentError("t must be positive")
    if not T >= 0:
        raise InvalidArgumentError("T must be nonnegative")
    return erfc(math.sqrt((x - y) ** 2 / t + T / (2.0 * t)))


def _tail_cutoff(t: float, T: float, d: float, abs_tol: float) -> float:
    # Bound for |4 (z - d) rho(z)| integrated over z < -L, using alpha >= z^2/t:
    #   <= (2 T / (sqrt(pi) t^2)) (L + |d|) [t^1.5 / (2 L^3) + 2 sqrt(t) L / T] (t / (2 L)) e^{-L^2/t}
    def poly(L):
        return (2.0 * T / (_SQRT_PI * t * t)) * (L + abs(d)) * (
            t**1.5 / (2.0 * L**3) + 2.0 * math.sqrt(t) * L / T) * t / (2.0 * L)

    L = max(1.0, math.sqrt(t * math.log(1.0 / abs_tol)))
    for _ in range(4):
        L = max(L, math.sqrt(t * max(math.log(poly(L) / abs_tol), 1.0)))
    return L


def spin_corr_from_density(t: float, T: float, x_minus_y: float, q: QuadratureConfig | None = None,
                           full_output: bool = False):
    """Spin correlation recovered from the limit density: ``4 int_{-inf}^{d} (z - d) rho(z) dz``."""
    q = q or QuadratureConfig()
    d = float(x_minus_y)
    L = _tail_cutoff(t, T, d, q.abs_tol)
    lower = -L - abs(d)

    def f(z):
        d2 = z * z
        alpha = d2 / t + T / (2.0 * t)
        rho = (T / (2.0 * _SQRT_PI * t * t)) * np.exp(-alpha) * (
            0.5 * alpha**-1.5 - (2.0 * d2 / T) * alpha**-0.5)
        return 4.0 * (z - d) * rho

    res = integrate(f, lower, d, q, breakpoints=(0.0,))
    return res if full_output else res.value


def crossing_probability_approx(n: int, t: float, tau: float) -> float:
    """Leading small-lag term ``sqrt(n tau / (2 pi t))`` of the odd-crossing probability."""
    require(n >= 1 and t > 0 and tau > 0, "need n >= 1, t > 0, tau > 0")
    return math.sqrt(n * tau / (2.0 * math.pi * t))


def effective_diffusion(n: int) -> float:
    """Effective diffusion rate ``n pi / 8`` of the zero-crossing picture."""
    require(n >= 1, "n must be positive")
    return n * math.pi / 8.0


def charpoly_pair_moment(n: int, x: float, y: float):
    """``E det(M - x) det(M - y)`` for the time-1 ensemble, as ``(sign, log|value|)``.

    Equals ``2^{-n} n! e_n(2 x y)``.
    """
    require(isinstance(n, (int, np.integer)) and n >= 1, "n must be a positive integer")
    sign, log_e = log_exp_poly_ratio(n, 2.0 * x * y)
    return sign, log_e + math.lgamma(n + 1) - n * math.log(2.0)


def charpoly_pair_moment_value(n: int, x: float, y: float) -> float:
    sign, log_mag = charpoly_pair_moment(n, x, y)
    return sign * math.exp(log_mag)


def modified_density_bin_averages(n: int, t: float, tau: float, y_edges, x_edges, nodes: int = 6,
                                  q: QuadratureConfig | None = None) -> np.ndarray:
    """Average of the finite-N density over each ``[y_i, y_{i+1}) x [x_j, x_{j+1})`` bin.

    Tensor Gauss-Legendre rule with ``nodes`` points per axis; result has shape
    ``(len(y_edges) - 1, len(x_edges) - 1)``.
    """
    q = q or QuadratureConfig(rel_tol=1e-9, abs_tol=1e-13)
    y_edges = np.asarray(y_edges, dtype=float)
    x_edges = np.asarray(x_edges, dtype=float)
    g, w = np.polynomial.legendre.leggauss(nodes)
    w = 0.5 * w
    out = np.empty((y_edges.size - 1, x_edges.size - 1))
    for i in range(out.shape[0]):
        ys = y_edges[i] + (y_edges[i + 1] - y_edges[i]) * 0.5 * (g + 1.0)
        for j in range(out.shape[1]):
            xs = x_edges[j] + (x_edges[j + 1] - x_edges[j]) * 0.5 * (g + 1.0)
            vals = np.array([[modified_density_finite_n(TwoTimeParams(n, t, tau, float(yy), float(xx)), q)
                              for xx in xs] for yy in ys])
            out[i, j] = float(w @ vals @ w)
    return out
