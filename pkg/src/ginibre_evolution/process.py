"""Sampling of gl(N, R)-valued Brownian motion.

Convention: with ``<A, B> = tr(A B^T)`` the process has covariance
``E <A, M_t> <B, M_s> = 1/2 <A, B> min(s, t)``.  Each entry is therefore a
Brownian motion with **variance t/2** at time t (not t).  At t = 1 this is the
real Ginibre ensemble with density proportional to ``exp(-tr M M^T)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import require
from .rng import PURPOSE_PROCESS, SeedSpec, substream


@dataclass(frozen=True)
class MatrixSample:
    """An N x N real matrix drawn from the process at a given time."""

    n: int
    time: float
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        require(self.n >= 1, "n must be positive")
        require(entries.shape == (self.n, self.n), f"entries must be {self.n}x{self.n}, got {entries.shape}")
        require(self.time >= 0, "time must be nonnegative")
        if self.time == 0:
            require(not entries.any(), "at time 0 every entry must be exactly 0")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class PathTimes:
    """Strictly increasing positive observation times t_1 < ... < t_n."""

    times: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        require(len(times) >= 1, "at least one time is required")
        require(all(t > 0 for t in times), "times must be positive")
        require(all(b > a for a, b in zip(times, times[1:])), "times must be strictly increasing")
        object.__setattr__(self, "times", times)

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(self.times)

    def increments(self) -> np.ndarray:
        return np.diff((0.0,) + self.times)


def _as_times(times) -> PathTimes:
    return times if isinstance(times, PathTimes) else PathTimes(tuple(times))


def _check_n(n):
    require(isinstance(n, (int, np.integer)) and n >= 1, "n must be a positive integer")


def sample_increment(n: int, dt: float, seed: SeedSpec) -> MatrixSample:
    """One Gaussian increment over a time step ``dt``: iid N(0, dt/2) entries."""
    _check_n(n)
    require(dt > 0, "dt must be positive")
    gen = seed.generator(PURPOSE_PROCESS)
    return MatrixSample(n, float(dt), np.sqrt(dt / 2.0) * gen.standard_normal((n, n)))


def draw_path(n: int, times: Sequence[float], gen: np.random.Generator) -> np.ndarray:
    """Raw path array of shape ``(len(times), n, n)`` from an open generator."""
    steps = np.sqrt(_as_times(times).increments() / 2.0)
    path = np.empty((len(steps), n, n))
    for k, s in enumerate(steps):
        gen.standard_normal(out=path[k])
        path[k] *= s
        if k:
            path[k] += path[k - 1]
    return path


def sample_path(n: int, times, seed: SeedSpec) -> list:
    """Values of the process at each of ``times`` along one sample path.

    ``M_{t_k} = M_{t_{k-1}} + increment(t_k - t_{k-1})``; the first increment is
    drawn exactly as :func:`sample_increment` would draw it from the same seed.
    """
    _check_n(n)
    times = _as_times(times)
    path = draw_path(n, times, seed.generator(PURPOSE_PROCESS))
    return [MatrixSample(n, t, m) for t, m in zip(times, path)]


def path_block(n: int, times, master_seed: int, start: int, count: int) -> np.ndarray:
    """Paths for stream indices ``start .. start+count-1``, shape ``(count, len(times), n, n)``.

    Sample ``start + i`` is bitwise identical to ``sample_path(n, times, SeedSpec(master_seed, start + i))``.
    """
    _check_n(n)
    times = _as_times(times)
    out = np.empty((count, len(times), n, n))
    for i in range(count):
        out[i] = draw_path(n, times, substream(master_seed, start + i, PURPOSE_PROCESS))
    return out
