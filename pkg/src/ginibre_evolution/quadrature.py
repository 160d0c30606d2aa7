"""Globally adaptive Gauss-Legendre quadrature.

Each panel is integrated with a fixed 20-point rule and with the same rule on
its two halves; the difference of the two serves as the panel's error
estimate and the (more accurate) half-sum as its value.  The panel with the
largest estimate is bisected until the summed estimate meets the tolerance.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ToleranceFailure, require

_ORDER = 20
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 10_000

    def __post_init__(self):
        require(self.rel_tol > 0 and self.abs_tol > 0, "tolerances must be positive")
        require(int(self.max_subdivisions) >= 1, "max_subdivisions must be at least 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_WEIGHTS, f(mid + half * _NODES)))


def _refine(f, a, b, whole):
    m = 0.5 * (a + b)
    left = _panel(f, a, m)
    right = _panel(f, m, b)
    return (a, m, left), (m, b, right), abs(whole - (left + right))


def integrate(f, a: float, b: float, config: QuadratureConfig | None = None, breakpoints=()) -> QuadResult:
    """Integral of a vectorized ``f`` over the finite interval ``[a, b]``.

    ``breakpoints`` inside ``(a, b)`` start the subdivision there (kinks,
    peaks).  Raises :class:`ToleranceFailure` carrying the best estimate when
    ``config.max_subdivisions`` bisections do not reach the tolerance.
    """
    config = config or QuadratureConfig()
    require(math.isfinite(a) and math.isfinite(b), "integration limits must be finite")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    # heap entries: (-error, tie-break counter, a, b, value of whole panel, children)
    heap = []
    counter = 0
    for lo, hi in zip(cuts, cuts[1:]):
        whole = _panel(f, lo, hi)
        left, right, err = _refine(f, lo, hi, whole)
        heap.append((-err, counter, left, right))
        counter += 1
    heapq.heapify(heap)
    splits = 0
    while True:
        total = math.fsum(l[2] + r[2] for _, _, l, r in heap)
        error = math.fsum(-e for e, _, _, _ in heap)
        if error <= max(config.abs_tol, config.rel_tol * abs(total)):
            return QuadResult(sign * total, error, len(heap))
        if splits >= config.max_subdivisions:
            raise ToleranceFailure(
                f"quadrature reached {splits} subdivisions with error {error:.3g}",
                estimate=sign * total, error=error)
        _, _, left, right = heapq.heappop(heap)
        for lo, hi, whole in (left, right):
            l, r, err = _refine(f, lo, hi, whole)
            heapq.heappush(heap, (-err, counter, l, r))
            counter += 1
        splits += 1
