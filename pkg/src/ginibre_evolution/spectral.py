"""Real eigenvalues, spin variables and the counting measure.

For a real matrix ``M`` the spin at ``x`` is ``s_x(M) = (-1)^{#real eigenvalues < x}``.
Complex eigenvalues come in conjugate pairs and contribute a positive factor to
``det(M - xI)``, so away from the spectrum ``s_x(M) = sgn det(M - xI)``.

Conventions at an eigenvalue (a probability-zero event):

* :func:`spin_at` counts eigenvalues *strictly* below ``x``, so an eigenvalue
  sitting exactly at ``x`` is not counted.
* :func:`spin_right` gives the right limit ``s_{x+}``, which does count it.
  Estimators weight each eigenvalue by its right-limit spin.
* :func:`count_real_in` counts the open interval by default and the
  right-continuous bin ``[a, b)`` with ``half_open=True``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

from . import schur
from .errors import DegenerateInputError, InvalidArgumentError, require
from .process import MatrixSample

PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of one real matrix, split into real ones and conjugate pairs.

    ``complex_pairs`` has one row ``(a, b)`` with ``b > 0`` per pair ``a +- ib``.
    """

    real_eigs: np.ndarray
    complex_pairs: np.ndarray = field(repr=False)
    n: int

    def __post_init__(self):
        real = np.sort(np.asarray(self.real_eigs, dtype=float).ravel())
        pairs = np.asarray(self.complex_pairs, dtype=float).reshape(-1, 2)
        require(real.size + 2 * len(pairs) == self.n, "eigenvalue count does not match n")
        require(np.all(pairs[:, 1] > 0), "imaginary parts of pairs must be strictly positive")
        real.setflags(write=False)
        pairs.setflags(write=False)
        object.__setattr__(self, "real_eigs", real)
        object.__setattr__(self, "complex_pairs", pairs)

    @property
    def num_real(self) -> int:
        return int(self.real_eigs.size)

    def spin_profile(self) -> "SpinProfile":
        return SpinProfile(self.real_eigs)


@dataclass(frozen=True)
class SpinProfile:
    """The piecewise-constant function ``x -> s_x``, stored as its jump points."""

    jump_points: np.ndarray

    def __post_init__(self):
        jumps = np.sort(np.asarray(self.jump_points, dtype=float).ravel())
        jumps.setflags(write=False)
        object.__setattr__(self, "jump_points", jumps)

    def __call__(self, x):
        below = np.searchsorted(self.jump_points, x, side="left")
        return 1 - 2 * (np.asarray(below) % 2)

    def right_limit(self, x):
        below = np.searchsorted(self.jump_points, x, side="right")
        return 1 - 2 * (np.asarray(below) % 2)

    def weights(self) -> np.ndarray:
        """Right-limit spin at each jump point: ``(-1)^(k+1)`` for the k-th (0-based)."""
        return right_limit_weights(self.jump_points.size)


def _entries(m) -> np.ndarray:
    if isinstance(m, MatrixSample):
        return m.entries
    a = np.asarray(m, dtype=float)
    require(a.ndim == 2 and a.shape[0] == a.shape[1], "expected a square matrix")
    return a


def _split(w: np.ndarray, n: int) -> Spectrum:
    w = np.asarray(w)
    if np.iscomplexobj(w):
        real = w.real[w.imag == 0]
        upper = w[w.imag > 0]
        pairs = np.column_stack([upper.real, upper.imag])
    else:
        real, pairs = w, np.zeros((0, 2))
    return Spectrum(real, pairs, n)


def real_schur_spectrum(m, method: str = "lapack") -> Spectrum:
    """Spectrum of a real square matrix, classified by the real Schur block structure.

    ``method="francis"`` runs the in-repo Hessenberg + Francis double-shift QR
    (:mod:`ginibre_evolution.schur`); ``method="lapack"`` uses LAPACK's
    ``dhseqr`` through :func:`numpy.linalg.eigvals`, which also reports the
    eigenvalues of 1x1 Schur blocks with an imaginary part of exactly zero.
    """
    a = _entries(m)
    require(np.all(np.isfinite(a)), "matrix entries must be finite")
    n = a.shape[0]
    if method == "francis":
        wr, wi = schur.eigenvalues(a)
        return Spectrum(wr[wi == 0], np.column_stack([wr[wi > 0], wi[wi > 0]]), n)
    if method == "lapack":
        return _split(np.linalg.eigvals(a), n)
    raise InvalidArgumentError(f"unknown method {method!r}")


def real_eigenvalues_batch(stack: np.ndarray) -> list:
    """Sorted real eigenvalues of each matrix in a ``(m, n, n)`` stack."""
    w = np.linalg.eigvals(stack)
    if not np.iscomplexobj(w):
        return [np.sort(row) for row in w]
    return [np.sort(row.real[row.imag == 0]) for row in w]


def spin_at(s: Spectrum, x: float) -> int:
    """``(-1)`` to the number of real eigenvalues strictly below ``x``."""
    return int(s.spin_profile()(x))


def spin_right(s: Spectrum, x: float) -> int:
    """Right-limit spin ``s_{x+}``: eigenvalues equal to ``x`` count as below."""
    return int(s.spin_profile().right_limit(x))


def right_limit_weights(count: int) -> np.ndarray:
    """``s_{lambda_k+}`` for sorted distinct real eigenvalues: -1, +1, -1, ..."""
    return np.where(np.arange(count) % 2 == 0, -1, 1)


def spin_via_det_sign(m, x: float) -> int:
    """``sgn det(M - xI)`` from a partially pivoted LU factorization.

    Only the sign is accumulated (row swaps and pivot signs); the determinant
    itself is never formed.  Raises :class:`DegenerateInputError` when a pivot
    falls below 1e-300 in magnitude.
    """
    a = _entries(m)
    lu, piv, info = lapack.dgetrf(a - x * np.eye(a.shape[0]))
    diag = np.diag(lu)
    if info > 0 or np.any(np.abs(diag) < PIVOT_FLOOR):
        raise DegenerateInputError(f"M - xI is singular at x={x!r}")
    swaps = int(np.count_nonzero(piv != np.arange(a.shape[0])))
    negative = int(np.count_nonzero(diag < 0))
    return -1 if (swaps + negative) % 2 else 1


def det_signs(stack: np.ndarray, xs) -> np.ndarray:
    """``sgn det(M_i - x_j I)`` for a stack of matrices, shape ``(m, len(xs))``.

    Batched counterpart of :func:`spin_via_det_sign` (same LAPACK factorization).
    """
    stack = np.asarray(stack, dtype=float)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    eye = np.eye(stack.shape[-1])
    out = np.empty((stack.shape[0], xs.size), dtype=np.int8)
    for j, x in enumerate(xs):
        sign, logdet = np.linalg.slogdet(stack - x * eye)
        if np.any(sign == 0):
            raise DegenerateInputError(f"M - xI is singular at x={x!r}")
        out[:, j] = sign
    return out


def count_real_in(s: Spectrum, a: float, b: float, half_open: bool = False) -> int:
    """Number of real eigenvalues in ``(a, b)``, or in ``[a, b)`` if ``half_open``."""
    if not a < b:
        raise InvalidArgumentError("count_real_in needs a < b")
    lo = np.searchsorted(s.real_eigs, a, side="left" if half_open else "right")
    hi = np.searchsorted(s.real_eigs, b, side="left")
    return int(max(hi - lo, 0))
