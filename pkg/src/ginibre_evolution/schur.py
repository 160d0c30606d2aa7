"""Eigenvalues of a real matrix via the real Schur form.

Householder reduction to upper Hessenberg form followed by the Francis
implicit double-shift QR iteration (the EISPACK ``hqr`` scheme).  Deflation
leaves 1x1 and 2x2 diagonal blocks; a 1x1 block, or a 2x2 block whose
discriminant is nonnegative, yields real eigenvalues reported with an imaginary
part of exactly zero.  Realness is therefore a structural property of the
converged form, never the result of comparing an imaginary part to a tolerance.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericalFailure


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Orthogonally similar upper Hessenberg matrix (Householder reflections)."""
    h = np.array(a, dtype=float, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(norm, x[0])
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def _sign(a, b):
    return abs(a) if b >= 0 else -abs(a)


def hessenberg_eigenvalues(h: np.ndarray, max_sweeps: int | None = None):
    """Francis double-shift QR on an upper Hessenberg matrix.

    Returns ``(wr, wi)``.  Complex eigenvalues come in adjacent conjugate pairs
    with ``wi > 0`` first in the pair's upper position; real ones have ``wi == 0.0``.
    Raises :class:`NumericalFailure` once ``max_sweeps`` (default ``40 n``) QR
    sweeps have been spent without full deflation.
    """
    n = h.shape[0]
    if max_sweeps is None:
        max_sweeps = 40 * n
    # 1-based working copy keeps the classical index arithmetic readable.
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = h
    wr = np.zeros(n + 1)
    wi = np.zeros(n + 1)
    anorm = float(np.sum(np.abs(np.triu(h, -1))))
    sweeps = 0
    nn = n
    t = 0.0
    x = y = w = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) + s == s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = z
                    wi[nn] = -z
                nn -= 2
                break
            if sweeps >= max_sweeps:
                raise NumericalFailure(f"QR iteration did not converge within {max_sweeps} sweeps")
            if its == 10 or its == 20:
                # exceptional shift
                t += x
                for i in range(1, nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            sweeps += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = _sign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                # row transformation
                rows = slice(k, nn + 1)
                pv = a[k, rows] + q * a[k + 1, rows]
                if k != nn - 1:
                    pv = pv + r * a[k + 2, rows]
                    a[k + 2, rows] -= pv * z
                a[k + 1, rows] -= pv * y
                a[k, rows] -= pv * x
                # column transformation
                cols = slice(l, min(nn, k + 3) + 1)
                pv = x * a[cols, k] + y * a[cols, k + 1]
                if k != nn - 1:
                    pv = pv + z * a[cols, k + 2]
                    a[cols, k + 2] -= pv * r
                a[cols, k + 1] -= pv * q
                a[cols, k] -= pv
            if l >= nn - 1:
                break
    return wr[1:], wi[1:]


def eigenvalues(a: np.ndarray, max_sweeps: int | None = None):
    """``(wr, wi)`` for a general real square matrix."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return np.zeros(0), np.zeros(0)
    return hessenberg_eigenvalues(hessenberg(a), max_sweeps)
