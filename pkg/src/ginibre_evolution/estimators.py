"""Monte Carlo estimators for spin correlations, modified densities and eigenvalue counts.

Sample ``i`` always comes from substream ``(seed.master_seed, seed.stream_index + i)``.
Work is split into blocks that may run in any process.  Per-block results are
either exact integer sums (spin weights are +-1) or per-sample floats
concatenated in sample order and summed with ``math.fsum``, so an estimate
depends only on the configuration, never on the worker count or block size.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import pfaffian
from .errors import InvalidArgumentError, require
from .process import PathTimes, path_block
from .rng import SeedSpec
from .spectral import det_signs, real_eigenvalues_batch, right_limit_weights

_BLOCK_BUDGET = 2**23  # matrix entries per block


@dataclass(frozen=True)
class McConfig:
    n: int
    samples: int
    seed: SeedSpec
    times: PathTimes
    workers: int = 1

    def __post_init__(self):
        require(isinstance(self.n, (int, np.integer)) and self.n >= 2, "n must be an integer >= 2")
        require(isinstance(self.samples, (int, np.integer)) and self.samples >= 2,
                "samples must be at least 2 so that a standard error exists")
        require(isinstance(self.seed, SeedSpec), "seed must be a SeedSpec")
        if not isinstance(self.times, PathTimes):
            object.__setattr__(self, "times", PathTimes(tuple(self.times)))
        require(isinstance(self.workers, (int, np.integer)) and self.workers >= 1, "workers must be >= 1")


class Estimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True)
class DensityEstimate:
    """Binned density: ``values[i, ...]`` over bins with the given edges (right-open)."""

    edges: tuple
    values: np.ndarray = field(repr=False)
    stderrs: np.ndarray = field(repr=False)
    samples: int

    @property
    def centers(self) -> tuple:
        return tuple(0.5 * (e[1:] + e[:-1]) for e in self.edges)

    @property
    def bin_widths(self) -> tuple:
        return tuple(np.diff(e) for e in self.edges)


@dataclass(frozen=True)
class RealCountEstimate:
    mean: float
    stderr: float
    density: float
    density_stderr: float
    window: tuple
    parity_ok: bool


@dataclass(frozen=True)
class ScaledEstimate:
    """Mean and standard error stored as ``scaled * exp(log_scale)`` to survive overflow."""

    scaled_mean: float
    scaled_stderr: float
    log_scale: float

    @staticmethod
    def _expand(scaled, log_scale):
        # saturates to +-inf when the product is not representable
        if scaled == 0:
            return 0.0
        log_mag = math.log(abs(scaled)) + log_scale
        if log_mag > 709.78:
            return math.copysign(math.inf, scaled)
        return scaled * math.exp(log_scale) if log_scale < 709 else math.copysign(math.exp(log_mag), scaled)

    @property
    def value(self) -> float:
        return self._expand(self.scaled_mean, self.log_scale)

    @property
    def stderr(self) -> float:
        return self._expand(self.scaled_stderr, self.log_scale)

    def __iter__(self):
        return iter((self.value, self.stderr))


# --- block kernels (module level so they pickle) ---------------------------------

def _block_size(n: int, slices: int) -> int:
    return int(max(1, min(512, _BLOCK_BUDGET // (slices * n * n))))


def _sum_sq(per_sample: np.ndarray):
    per_sample = per_sample.astype(np.int64)
    return per_sample.sum(axis=0), (per_sample * per_sample).sum(axis=0)


def _spin_products_block(n, times, master, start, count, xs, ys):
    paths = path_block(n, times, master, start, count)
    early = det_signs(paths[:, 0], ys).astype(np.int64)
    late = det_signs(paths[:, 1], xs).astype(np.int64)
    return _sum_sq(early * late)


def _weighted_hist(eigs, edges):
    w = right_limit_weights(eigs.size)
    h, _ = np.histogram(eigs, bins=edges, weights=w)
    # np.histogram closes the last bin; drop points sitting exactly on the top edge
    top = eigs == edges[-1]
    if np.any(top):
        h[-1] -= w[top].sum()
    return np.rint(h).astype(np.int64)


def _spin_fixed_block(n, times, master, start, count, xs):
    paths = path_block(n, times, master, start, count)
    signs = det_signs(paths[:, 0], xs).astype(np.int64)
    return _sum_sq(np.prod(signs, axis=1))


def _density_two_time_block(n, times, master, start, count, y_edges, x_edges):
    paths = path_block(n, times, master, start, count)
    early = real_eigenvalues_batch(paths[:, 0])
    late = real_eigenvalues_batch(paths[:, 1])
    per = np.stack([np.outer(_weighted_hist(a, y_edges), _weighted_hist(b, x_edges))
                    for a, b in zip(early, late)])
    return _sum_sq(per)


def _pair_profile_block(n, times, master, start, count, half_width, r_edges):
    paths = path_block(n, times, master, start, count)
    per = np.zeros((count, r_edges.size - 1), dtype=np.int64)
    for s, eigs in enumerate(real_eigenvalues_batch(paths[:, 0])):
        w = right_limit_weights(eigs.size)
        i, j = np.triu_indices(eigs.size, 1)
        keep = (eigs[i] >= -half_width) & (eigs[i] < half_width)
        sep = eigs[j][keep] - eigs[i][keep]
        prod = (w[i] * w[j])[keep]
        b = np.searchsorted(r_edges, sep, side="right") - 1
        ok = (b >= 0) & (b < r_edges.size - 1)
        np.add.at(per[s], b[ok], prod[ok])
    return _sum_sq(per)


def _kpoint_block(n, times, master, start, count, windows):
    paths = path_block(n, times, master, start, count)
    per = np.empty(count, dtype=np.int64)
    for s, eigs in enumerate(real_eigenvalues_batch(paths[:, 0])):
        w = right_limit_weights(eigs.size)
        total = 1
        for a, b in windows:
            inside = (eigs >= a) & (eigs < b)
            total *= int(w[inside].sum())
        per[s] = total
    return _sum_sq(per)


def _real_count_block(n, times, master, start, count, window):
    paths = path_block(n, times, master, start, count)
    eig_lists = real_eigenvalues_batch(paths[:, 0])
    counts = np.array([e.size for e in eig_lists], dtype=np.int64)
    local = np.array([np.count_nonzero((e >= window[0]) & (e < window[1])) for e in eig_lists], dtype=np.int64)
    parity_ok = bool(np.all(counts % 2 == n % 2))
    return _sum_sq(counts), _sum_sq(local), parity_ok


def _charpoly_block(n, times, master, start, count, x, y):
    paths = path_block(n, times, master, start, count)
    m = paths[:, 0]
    eye = np.eye(n)
    sx, lx = np.linalg.slogdet(m - x * eye)
    if x == y:
        sy, ly = sx, lx
    else:
        sy, ly = np.linalg.slogdet(m - y * eye)
    return sx * sy, lx + ly


def _call(args):
    fn, n, times, master, start, count, extra = args
    return fn(n, times, master, start, count, *extra)


def _map_blocks(fn, cfg: McConfig, extra: tuple) -> list:
    size = _block_size(cfg.n, len(cfg.times))
    base = cfg.seed.stream_index
    jobs = [(fn, cfg.n, cfg.times, cfg.seed.master_seed, base + s, min(size, cfg.samples - s), extra)
            for s in range(0, cfg.samples, size)]
    if cfg.workers == 1 or len(jobs) == 1:
        return [_call(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_call, jobs))


def _reduce(parts):
    s = sum(p[0] for p in parts)
    q = sum(p[1] for p in parts)
    return s, q


def _mean_stderr(s, q, m):
    # s, q are exact integer sums; converted once
    s = np.asarray(s, dtype=object)
    q = np.asarray(q, dtype=object)
    mean = np.vectorize(lambda a: float(a) / m, otypes=[float])(s)
    var = np.vectorize(lambda a, b: max(float(b * m - a * a) / (m * (m - 1)), 0.0), otypes=[float])(s, q)
    return mean, np.sqrt(var / m)


# --- public estimators ------------------------------------------------------------------

def _two_times(cfg: McConfig):
    if len(cfg.times) != 2:
        raise InvalidArgumentError("two-time estimators need exactly two times")


def estimate_spin_corr_two_time(cfg: McConfig, x, y):
    """``E[s_x(M_{t+tau}) s_y(M_t)]`` with its standard error; ``x`` and ``y`` may be equal-length arrays."""
    _two_times(cfg)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    require(xs.shape == ys.shape, "x and y must have the same shape")
    s, q = _reduce(_map_blocks(_spin_products_block, cfg, (xs, ys)))
    mean, err = _mean_stderr(s, q, cfg.samples)
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return Estimate(float(mean[0]), float(err[0]))
    return Estimate(mean, err)


def estimate_spin_corr_fixed_time(cfg: McConfig, xs) -> Estimate:
    """``E prod_k s_{x_k}(M_t)`` at the single configured time."""
    require(len(cfg.times) == 1, "fixed-time estimators need a single time")
    pts = np.atleast_1d(np.asarray(xs, dtype=float))
    s, q = _reduce(_map_blocks(_spin_fixed_block, cfg, (pts,)))
    mean, err = _mean_stderr(s, q, cfg.samples)
    return Estimate(float(mean), float(err))


def estimate_crossing_parity(cfg: McConfig, x0: float = 0.0) -> Estimate:
    """Probability of an odd number of real-eigenvalue crossings of ``x0`` over ``[t, t + tau]``."""
    corr, err = estimate_spin_corr_two_time(cfg, x0, x0)
    return Estimate(0.5 * (1.0 - corr), 0.5 * err)


def _edges(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    require(e.ndim == 1 and e.size >= 2, "need at least two bin edges")
    require(np.all(np.diff(e) > 0), "bin edges must be strictly increasing")
    return e


def estimate_modified_density_two_time(cfg: McConfig, y_edges, x_edges) -> DensityEstimate:
    """Binned spin-weighted two-time density; axis 0 is ``y`` (time t), axis 1 is ``x`` (time t + tau)."""
    _two_times(cfg)
    y_edges, x_edges = _edges(y_edges), _edges(x_edges)
    s, q = _reduce(_map_blocks(_density_two_time_block, cfg, (y_edges, x_edges)))
    mean, err = _mean_stderr(s, q, cfg.samples)
    area = np.outer(np.diff(y_edges), np.diff(x_edges))
    return DensityEstimate((y_edges, x_edges), mean / area, err / area, cfg.samples)


def estimate_pair_profile(cfg: McConfig, r_edges, half_width: float = 5.0) -> DensityEstimate:
    """Fixed-time two-point modified density as a function of separation.

    Averages over the left point in ``[-half_width, half_width)``, so the value
    in bin ``[r_a, r_b)`` estimates ``mean over x of rho(x, x + r)`` averaged over r.
    """
    require(len(cfg.times) == 1, "fixed-time estimators need a single time")
    require(half_width > 0, "half_width must be positive")
    r_edges = _edges(r_edges)
    require(r_edges[0] > 0, "separation bins must be positive")
    s, q = _reduce(_map_blocks(_pair_profile_block, cfg, (half_width, r_edges)))
    mean, err = _mean_stderr(s, q, cfg.samples)
    norm = 2.0 * half_width * np.diff(r_edges)
    return DensityEstimate((r_edges,), mean / norm, err / norm, cfg.samples)


def estimate_fixed_time_kpoint(cfg: McConfig, windows) -> Estimate:
    """Spin-weighted coincidence rate of one real eigenvalue per window, per unit window volume."""
    require(len(cfg.times) == 1, "fixed-time estimators need a single time")
    wins = [(float(a), float(b)) for a, b in windows]
    if len(wins) % 2 or not wins:
        raise InvalidArgumentError("need a positive even number of windows")
    for a, b in wins:
        require(a < b, "each window needs a < b")
    for (a0, b0), (a1, b1) in zip(wins, wins[1:]):
        if a1 < b0:
            raise InvalidArgumentError("windows must be sorted and disjoint")
    s, q = _reduce(_map_blocks(_kpoint_block, cfg, (tuple(wins),)))
    mean, err = _mean_stderr(s, q, cfg.samples)
    vol = math.prod(b - a for a, b in wins)
    return Estimate(float(mean) / vol, float(err) / vol)


def estimate_real_count(cfg: McConfig, window=(-0.5, 0.5)) -> RealCountEstimate:
    """Mean number of real eigenvalues and the mean density in ``window`` (right-open)."""
    require(len(cfg.times) == 1, "real-count estimator needs a single time")
    a, b = float(window[0]), float(window[1])
    require(a < b, "window needs a < b")
    parts = _map_blocks(_real_count_block, cfg, ((a, b),))
    cs, cq = _reduce([p[0] for p in parts])
    ls, lq = _reduce([p[1] for p in parts])
    mean, err = _mean_stderr(cs, cq, cfg.samples)
    dmean, derr = _mean_stderr(ls, lq, cfg.samples)
    return RealCountEstimate(float(mean), float(err), float(dmean) / (b - a), float(derr) / (b - a),
                             (a, b), all(p[2] for p in parts))


def estimate_charpoly_pair(cfg: McConfig, x: float, y: float) -> ScaledEstimate:
    """Mean of ``det(M - x) det(M - y)`` at the single configured time."""
    require(len(cfg.times) == 1, "needs a single time")
    x, y = sorted((float(x), float(y)))
    parts = _map_blocks(_charpoly_block, cfg, (x, y))
    signs = np.concatenate([p[0] for p in parts])
    logs = np.concatenate([p[1] for p in parts])
    shift = float(np.max(logs[signs != 0])) if np.any(signs != 0) else 0.0
    vals = signs * np.exp(logs - shift)
    m = vals.size
    mean = math.fsum(vals) / m
    var = math.fsum((vals - mean) ** 2) / (m - 1)
    return ScaledEstimate(mean, math.sqrt(var / m), shift)


# --- normalization of the fixed-time Pfaffian law ----------------------------------------

def pair_profile_model(r_edges, scale: float) -> np.ndarray:
    """Bin averages of ``s^-2 rho_narrow(r / s)`` at K = 2 (``s = 1`` narrow, ``s = sqrt 2`` evolution)."""
    g, w = np.polynomial.legendre.leggauss(8)
    out = []
    for a, b in zip(r_edges[:-1], r_edges[1:]):
        rs = a + (b - a) * 0.5 * (g + 1.0)
        vals = [pfaffian.fixed_time_modified_density([0.0, r / scale], "narrow") / scale**2 for r in rs]
        out.append(0.5 * float(np.dot(w, vals)))
    return np.array(out)


@dataclass(frozen=True)
class ScaleResolution:
    scale: float
    scale_stderr: float
    chi2_narrow: float
    chi2_evolution: float
    chosen: str


def resolve_scale(profiles) -> ScaleResolution:
    """Fit the space scale of the fixed-time law to measured pair profiles.

    ``profiles`` is an iterable of :class:`DensityEstimate` from
    :func:`estimate_pair_profile`.  Returns the weighted least-squares scale,
    its curvature-based standard error, and the chi-square of both candidate
    normalizations.
    """
    profiles = list(profiles)

    def chi2(scale):
        total = 0.0
        for p in profiles:
            model = pair_profile_model(p.edges[0], scale)
            total += float(np.sum(((p.values - model) / p.stderrs) ** 2))
        return total

    fit = minimize_scalar(chi2, bounds=(0.5, 3.0), method="bounded", options={"xatol": 1e-6})
    h = 1e-3
    curv = (chi2(fit.x + h) - 2.0 * fit.fun + chi2(fit.x - h)) / (h * h)
    err = math.sqrt(2.0 / curv) if curv > 0 else math.inf
    c_narrow, c_evo = chi2(1.0), chi2(math.sqrt(2.0))
    return ScaleResolution(float(fit.x), err, c_narrow, c_evo, "narrow" if c_narrow < c_evo else "evolution")


def default_workers() -> int:
    env = os.environ.get("GINIBRE_WORKERS")
    return max(1, int(env)) if env else 1


def zscores(estimate: np.ndarray, stderr: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Per-point z-scores; a zero standard error gives 0 for exact agreement and inf otherwise."""
    estimate, stderr, reference = (np.asarray(a, dtype=float) for a in (estimate, stderr, reference))
    diff = estimate - reference
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, diff / stderr, np.where(diff == 0, 0.0, np.inf))
    return z


__all__ = [
    "McConfig", "Estimate", "DensityEstimate", "RealCountEstimate", "ScaledEstimate", "ScaleResolution",
    "estimate_spin_corr_two_time", "estimate_spin_corr_fixed_time", "estimate_crossing_parity", "estimate_modified_density_two_time",
    "estimate_pair_profile", "estimate_fixed_time_kpoint", "estimate_real_count", "estimate_charpoly_pair",
    "pair_profile_model", "resolve_scale", "default_workers", "zscores",
]
