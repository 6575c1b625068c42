"""Exact arithmetic in Z[zeta_m].

Class-group character values are m-th roots of unity, so every lambda_chi(n)
lives in Z[zeta_m]. We carry such values in the group ring Z[x]/(x^m - 1)
(an integer vector indexed by the exponent of zeta) and reduce modulo the
cyclotomic polynomial Phi_m only when comparing. Reduction gives the unique
coordinates in the power basis 1, zeta, ..., zeta^(phi(m)-1), so equality
tests are exact integer comparisons.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    poly = sympy.Poly(sympy.cyclotomic_poly(m, sympy.Symbol("x")))
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def reduction_matrix(m: int, length: int | None = None) -> np.ndarray:
    """Integer matrix R with (v @ R) = coordinates of sum_j v[j] zeta^j.

    Rows are x^j mod Phi_m for j < length (default m).
    """
    phi = cyclotomic_coeffs(m)
    deg = len(phi) - 1
    length = m if length is None else length
    rows = np.zeros((length, deg), dtype=np.int64)
    cur = np.zeros(deg, dtype=np.int64)
    cur[0] = 1
    tail = np.array(phi[:deg], dtype=np.int64)
    for j in range(length):
        rows[j] = cur
        # multiply by x, then eliminate x^deg with the monic relation
        top = cur[-1]
        cur = np.concatenate(([0], cur[:-1]))
        cur = cur - top * tail
    rows.setflags(write=False)
    return rows


def reduce(v: np.ndarray, m: int) -> np.ndarray:
    """Canonical coordinates of group-ring vectors along the last axis."""
    v = np.asarray(v, dtype=np.int64)
    return v @ reduction_matrix(m, v.shape[-1])


def ring_mul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Product in Z[x]/(x^m - 1) (cyclic convolution along the last axis)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
    for j in range(m):
        out += a[..., j : j + 1] * np.roll(b, j, axis=-1)
    return out


def ring_conj(a: np.ndarray) -> np.ndarray:
    """Complex conjugation: zeta^j -> zeta^(-j)."""
    a = np.asarray(a)
    return np.roll(a[..., ::-1], 1, axis=-1)


def ring_from_int(n, m: int) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape + (m,), dtype=np.int64)
    out[..., 0] = n
    return out


@lru_cache(maxsize=None)
def mult_tensor(m: int) -> np.ndarray:
    """T[i, j, k]: coordinate k of zeta^i * zeta^j in the reduced power basis."""
    deg = len(cyclotomic_coeffs(m)) - 1
    R = reduction_matrix(m, 2 * deg - 1 if deg else 1)
    T = np.zeros((deg, deg, deg), dtype=np.int64)
    for i in range(deg):
        for j in range(deg):
            T[i, j] = R[i + j]
    T.setflags(write=False)
    return T


def to_complex(v: np.ndarray, m: int) -> np.ndarray:
    """Numeric value of group-ring vectors (for display and cross-checks)."""
    zeta = np.exp(2j * np.pi * np.arange(m) / m)
    return np.asarray(v) @ zeta
