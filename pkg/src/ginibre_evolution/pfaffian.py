"""Pfaffians, fixed-time Pfaffian correlation formulas and the unitary group integral.

Two space normalizations appear for the fixed-time formulas:

``"narrow"``
    Gaussian kernel width ``e^{-2 r^2}`` with constant ``(8/pi)^{K/4}``.
``"evolution"``
    The same law rescaled to the process convention used everywhere else in
    this package (entry variance t/2): ``x -> x / sqrt(2)``, giving kernel
    ``e^{-r^2}`` and constant ``pi^{-K/4}`` at t = 1.

Monte Carlo at t = 1 selects ``"evolution"`` (see ``estimators.resolve_scale``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, require
from .rng import PURPOSE_HAAR, SeedSpec, substream
from .special import erfc

NORMALIZATIONS = ("narrow", "evolution")


@dataclass(frozen=True)
class SkewMatrix:
    """Even-dimensional skew-symmetric matrix held by its strict upper triangle."""

    dim: int
    upper: np.ndarray = field(repr=False)

    def __post_init__(self):
        require(isinstance(self.dim, (int, np.integer)) and self.dim >= 0, "dim must be a nonnegative integer")
        if self.dim % 2:
            raise InvalidArgumentError(f"Pfaffian needs an even dimension, got {self.dim}")
        upper = np.asarray(self.upper)
        require(upper.shape == (self.dim * (self.dim - 1) // 2,), "upper must hold dim*(dim-1)/2 entries")
        upper = upper.copy()
        upper.setflags(write=False)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_dense(cls, a) -> "SkewMatrix":
        """Read the strict upper triangle; the lower triangle is ignored."""
        a = np.asarray(a)
        require(a.ndim == 2 and a.shape[0] == a.shape[1], "expected a square matrix")
        if a.shape[0] % 2:
            raise InvalidArgumentError(f"Pfaffian needs an even dimension, got {a.shape[0]}")
        return cls(a.shape[0], a[np.triu_indices(a.shape[0], 1)])

    def dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=self.upper.dtype)
        iu = np.triu_indices(self.dim, 1)
        out[iu] = self.upper
        out.T[iu] = -self.upper
        return out


def _reduce(a):
    # Parlett-Reid reduction with partial pivoting; returns (swap parity sign, pivots) or None if singular
    if not isinstance(a, SkewMatrix):
        a = SkewMatrix.from_dense(a)
    w = a.dense()
    w = w.astype(complex if np.iscomplexobj(w) else float)
    n = a.dim
    swap_sign = 1
    pivots = []
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(w[k + 1:, k])))
        if kp != k + 1:
            w[[k + 1, kp], k:] = w[[kp, k + 1], k:]
            w[k:, [k + 1, kp]] = w[k:, [kp, k + 1]]
            swap_sign = -swap_sign
        pivot = w[k, k + 1]
        if pivot == 0:
            return swap_sign, None
        pivots.append(pivot)
        if k + 2 < n:
            tau = w[k, k + 2:] / pivot
            col = w[k + 2:, k + 1].copy()
            w[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return swap_sign, np.array(pivots, dtype=w.dtype)


def pfaffian(a) -> tuple:
    """Pfaffian as ``(sign, log|Pf|)``.

    Skew-symmetric Parlett-Reid reduction with partial pivoting.  ``sign`` is
    +-1 for real input, a unit-modulus complex phase for complex input, and 0
    (with log-magnitude ``-inf``) when the Pfaffian is exactly zero.
    """
    swap_sign, pivots = _reduce(a)
    if pivots is None:
        return 0, -math.inf
    log_mag = float(np.sum(np.log(np.abs(pivots))))
    if np.iscomplexobj(pivots):
        phase = complex(swap_sign) * complex(np.prod(pivots / np.abs(pivots)))
        return phase, log_mag
    return swap_sign * (-1 if np.count_nonzero(pivots < 0) % 2 else 1), log_mag


def pfaffian_value(a):
    """Pfaffian as a plain number; the pivot product is formed directly when it is representable."""
    swap_sign, pivots = _reduce(a)
    if pivots is None:
        return 0.0
    with np.errstate(over="ignore", under="ignore"):
        direct = swap_sign * np.prod(pivots)
    if np.isfinite(direct) and direct != 0:
        return complex(direct) if np.iscomplexobj(direct) else float(direct)
    sign, log_mag = pfaffian(a)
    return sign * math.exp(log_mag)


def canonical_symplectic(k: int) -> np.ndarray:
    """Block diagonal of ``[[0, 1], [-1, 0]]``, size ``k`` (even)."""
    if k % 2:
        raise InvalidArgumentError(f"symplectic matrix needs an even dimension, got {k}")
    return np.kron(np.eye(k // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_involution(h, convention: str = "transpose") -> np.ndarray:
    """``H^R = J H^T J^T`` (default) or, with ``convention="plain"``, ``J H^T J``.

    The default makes ``I^R = I`` and ``Tr (H - H^R)^2 = 2 Tr H^2 - 2 Tr H H^R``;
    the two conventions differ by an overall sign.
    """
    h = np.asarray(h)
    require(h.ndim >= 2 and h.shape[-1] == h.shape[-2], "expected square matrices")
    j = canonical_symplectic(h.shape[-1])
    ht = np.swapaxes(h, -1, -2)
    if convention == "transpose":
        return j @ ht @ j.T
    if convention == "plain":
        return j @ ht @ j
    raise InvalidArgumentError(f"unknown convention {convention!r}")


@dataclass(frozen=True)
class OrderedPoints:
    """Strictly increasing points ``x_1 < ... < x_K`` with K even."""

    xs: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        if len(xs) % 2:
            raise InvalidArgumentError(f"need an even number of points, got {len(xs)}")
        require(all(b > a for a, b in zip(xs, xs[1:])), "points must be strictly increasing")
        object.__setattr__(self, "xs", xs)

    def __len__(self):
        return len(self.xs)

    def array(self) -> np.ndarray:
        return np.array(self.xs)


def _points(xs, strict: bool = True) -> np.ndarray:
    if isinstance(xs, OrderedPoints):
        return xs.array()
    if strict:
        return OrderedPoints(tuple(xs)).array()
    arr = np.asarray(xs, dtype=float).ravel()
    if arr.size % 2:
        raise InvalidArgumentError(f"need an even number of points, got {arr.size}")
    require(np.all(np.diff(arr) >= 0), "points must be sorted")
    return arr


def vandermonde(xs) -> tuple:
    """``prod_{i > j} (x_i - x_j)`` as ``(sign, log|value|)``."""
    x = np.asarray(xs.xs if isinstance(xs, OrderedPoints) else xs, dtype=float)
    i, j = np.tril_indices(x.size, -1)
    diffs = x[i] - x[j]
    if np.any(diffs == 0):
        return 0, -math.inf
    sign = -1 if np.count_nonzero(diffs < 0) % 2 else 1
    return sign, float(np.sum(np.log(np.abs(diffs))))


@dataclass(frozen=True)
class HermitianFromPoints:
    """``H = U X U^dagger`` for a unitary ``U`` and the diagonal matrix ``X`` of the points."""

    u: np.ndarray = field(repr=False)
    xs: OrderedPoints
    h: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        require(u.shape == (len(self.xs), len(self.xs)), "U must be K x K")
        require(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12), "U must be unitary")
        h = (u * self.xs.array()) @ u.conj().T
        h = 0.5 * (h + h.conj().T)
        h.setflags(write=False)
        object.__setattr__(self, "h", h)


def haar_unitary(k: int, seed: SeedSpec) -> np.ndarray:
    """Haar-distributed ``k x k`` unitary: QR of a complex Gaussian with R's diagonal made positive."""
    require(isinstance(k, (int, np.integer)) and k >= 1, "k must be a positive integer")
    return haar_unitary_block(k, seed.master_seed, seed.stream_index, 1)[0]


def haar_unitary_block(k: int, master_seed: int, start: int, count: int) -> np.ndarray:
    """Unitaries for stream indices ``start .. start+count-1``; shape ``(count, k, k)``."""
    z = np.empty((count, k, k), dtype=complex)
    for i in range(count):
        g = substream(master_seed, start + i, PURPOSE_HAAR)
        parts = g.standard_normal((2, k, k))
        z[i] = (parts[0] + 1j * parts[1]) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def group_integrand(u: np.ndarray, xs, convention: str = "transpose") -> np.ndarray:
    """``exp(-Tr (H - H^R)^2 / 2)`` for ``H = U X U^dagger``; ``u`` may be a stack."""
    x = np.asarray(xs, dtype=float)
    h = (u * x) @ np.conj(np.swapaxes(u, -1, -2))
    d = h - symplectic_involution(h, convention)
    # Tr D^2 for Hermitian D is its squared Frobenius norm; for the other convention use the trace itself
    tr = np.real(np.einsum("...ij,...ji->...", d, d))
    return np.exp(-0.5 * tr)


def mc_group_integral(xs, samples: int, seed: SeedSpec, convention: str = "transpose",
                      block: int = 4096) -> tuple:
    """Haar average of :func:`group_integrand`, as ``(mean, standard error)``.

    ``xs`` must have even length and be sorted; coincident points are allowed.
    """
    x = _points(xs, strict=False)
    require(samples >= 1, "samples must be positive")
    vals = []
    for start in range(0, samples, block):
        count = min(block, samples - start)
        u = haar_unitary_block(x.size, seed.master_seed, seed.stream_index + start, count)
        vals.append(group_integrand(u, x, convention))
    v = np.concatenate(vals)
    mean = math.fsum(v) / v.size
    if v.size < 2:
        return mean, math.inf
    var = math.fsum((v - mean) ** 2) / (v.size - 1)
    return mean, math.sqrt(var / v.size)


def density_kernel(xs, width: float = 2.0) -> SkewMatrix:
    """``[(x_i - x_j) exp(-width (x_i - x_j)^2)]`` as a skew matrix."""
    x = np.asarray(xs, dtype=float)
    d = x[:, None] - x[None, :]
    return SkewMatrix.from_dense(d * np.exp(-width * d * d))


def localization_ratio(xs, samples: int, seed: SeedSpec, width: float = 2.0) -> tuple:
    """``mc_group_integral(xs) * Delta(x) / Pf[kernel]`` with its standard error.

    ``width=2`` is the kernel as printed alongside the group integral;
    ``width=1`` is the width implied by the same integral at K = 2.
    """
    pts = _points(xs)
    mean, err = mc_group_integral(pts, samples, seed)
    vs, vlog = vandermonde(pts)
    ps, plog = pfaffian(density_kernel(pts, width))
    scale = vs * ps * math.exp(vlog - plog)
    return mean * scale, err * abs(scale)


def _scale(normalization: str, t: float) -> tuple:
    # returns (kernel width, space scale) so that the kernel argument is diff / space scale
    if normalization == "narrow":
        return 2.0, math.sqrt(t)
    if normalization == "evolution":
        return 1.0, math.sqrt(t)
    raise InvalidArgumentError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")


def fixed_time_modified_density(xs, normalization: str = "narrow", t: float = 1.0) -> float:
    """Fixed-time K-point modified density as a Pfaffian.

    ``narrow``: ``(8/pi)^{K/4} Pf[(x_i - x_j) e^{-2 (x_i - x_j)^2}]``.
    ``evolution``: ``t^{-K/2} pi^{-K/4} Pf[(u_i - u_j) e^{-(u_i - u_j)^2}]`` with ``u = x / sqrt(t)``.
    """
    x = _points(xs, strict=False)
    require(t > 0, "t must be positive")
    k = x.size
    width, space = _scale(normalization, t)
    u = x / space
    if normalization == "narrow":
        log_const = 0.25 * k * math.log(8.0 / math.pi)
    else:
        log_const = -0.25 * k * math.log(math.pi)
    log_const -= k * math.log(space)
    sign, log_pf = pfaffian(density_kernel(u, width))
    if sign == 0:
        return 0.0
    return sign * math.exp(log_pf + log_const)


def fixed_time_spin_correlation(xs, normalization: str = "narrow", t: float = 1.0) -> float:
    """``E prod_k s_{x_k}(M_t)`` as ``Pf[sgn(j - i) erfc(c |x_j - x_i| / sqrt(t))]``.

    ``c = sqrt(2)`` for ``narrow``, ``c = 1`` for ``evolution``.  The kernel is
    the integral of the density kernel from the separation to infinity, so the
    normalizing constants cancel and two coincident points give exactly 1.
    """
    x = _points(xs, strict=False)
    require(t > 0, "t must be positive")
    if x.size == 0:
        return 1.0
    c = math.sqrt(2.0) if _scale(normalization, t)[0] == 2.0 else 1.0
    k = x.size
    a = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            a[i, j] = erfc(c * (x[j] - x[i]) / math.sqrt(t))
    return pfaffian_value(SkewMatrix.from_dense(a))
