"""Compactly supported smooth weights and their transforms.

The canonical window on [u0, u1] is the bump exp(-s / ((u - u0)(u1 - u)))
rescaled to peak value 1. Every quantity built from it (sifted sums, main
terms, explicit-formula sides) is linear in the window, so the rescaling only
fixes units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import sympy
from scipy import integrate


@dataclass(frozen=True)
class SmoothWindow:
    u0: float
    u1: float
    sharpness: float = 1.0

    def __post_init__(self):
        if not self.u1 > self.u0:
            raise ValueError(f"empty support [{self.u0}, {self.u1}]")
        if self.sharpness <= 0:
            raise ValueError("sharpness must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (self.u0, self.u1)

    @property
    def _qmax(self) -> float:
        return 0.25 * (self.u1 - self.u0) ** 2

    def __call__(self, u):
        u = np.asarray(u, dtype=np.float64)
        q = (u - self.u0) * (self.u1 - u)
        inside = q > 0
        out = np.zeros_like(u)
        out[inside] = np.exp(self.sharpness * (1.0 / self._qmax - 1.0 / q[inside]))
        return out if out.ndim else float(out)

    @cached_property
    def _nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return self._nodes_for(400)

    def _nodes_for(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        t, w = _leggauss(n)
        half = 0.5 * (self.u1 - self.u0)
        return self.u0 + half * (t + 1.0), half * w

    def integral(self, func) -> complex:
        """Gauss-Legendre quadrature of phi(u) * func(u) over the support.

        The window vanishes to all orders at both ends, so 400 nodes reach
        double precision for integrands oscillating fewer than ~100 times.
        """
        u, w = self._nodes
        return np.sum(w * self(u) * func(u))

    def fourier(self, xi: float = 0.0, tol: float = 1e-10) -> complex:
        """phi_hat(xi) = int phi(u) e(-xi u) du by adaptive quadrature."""
        re, _ = integrate.quad(lambda u: self(u) * math.cos(2 * math.pi * xi * u), self.u0, self.u1, epsabs=tol, epsrel=tol, limit=200)
        im, _ = integrate.quad(lambda u: -self(u) * math.sin(2 * math.pi * xi * u), self.u0, self.u1, epsabs=tol, epsrel=tol, limit=200)
        return complex(re, im)

    @cached_property
    def mass(self) -> float:
        """phi_hat(0) = int phi."""
        return self.fourier(0.0).real

    def mellin(self, s: complex) -> complex:
        """int phi(u) u^(s-1) du."""
        return complex(self.integral(lambda u: u ** (s - 1)))

    def log_mellin(self, s, x: float) -> np.ndarray:
        """Phi~(s) = int phi(u) x^(u (s - 1)) du / u, vectorized over s.

        This is the Mellin transform of t -> phi(log t / log x) / (t log t).
        """
        s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
        L = math.log(x)
        # keep at least 8 nodes per oscillation of x^(i t u) across the support
        waves = float(np.max(np.abs(s.imag), initial=0.0)) * L * (self.u1 - self.u0) / (2 * math.pi)
        u, w = self._nodes if waves <= 50 else self._nodes_for(int(8 * waves) + 1)
        kern = (w * self(u) / u)[None, :] * np.exp(np.outer(s - 1.0, u) * L)
        return kern.sum(axis=1)

    @cached_property
    def _third_derivative(self):
        u = sympy.Symbol("u")
        a, b, k = sympy.nsimplify(self.u0), sympy.nsimplify(self.u1), sympy.nsimplify(self.sharpness)
        qmax = (b - a) ** 2 / 4
        g = sympy.exp(k * (1 / qmax - 1 / ((u - a) * (b - u)))) / u
        return sympy.lambdify(u, sympy.diff(g, u, 3), "numpy")

    def third_derivative_weight(self, x: float) -> float:
        """int |g'''(u)| x^(-u/2) du for g(u) = phi(u)/u.

        Three integrations by parts give
        |Phi~(1/2 + i t)| <= |(1/2 - i t) log x|^(-3) * this quantity.
        """
        d3 = self._third_derivative

        def integrand(u):
            if u <= self.u0 or u >= self.u1:
                return 0.0
            return abs(float(d3(u))) * x ** (-u / 2)

        # the derivative oscillates a few times; split the support to help quad
        edges = np.linspace(self.u0, self.u1, 33)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(integrand, lo, hi, limit=200, epsrel=1e-10)
            total += val
        return total


@lru_cache(maxsize=16)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


# ---------------------------------------------------------------- partition bumps


def _psi(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, and S(t) + S(1 - t) = 1."""
    t = np.asarray(t, dtype=np.float64)
    a, b = _psi(t), _psi(1.0 - t)
    return a / (a + b)


@dataclass(frozen=True)
class GeometricPartition:
    """Smooth partition of t = log p / log x into geometric pieces.

    With alpha = (r/3)^(1/J) and v = log(r t) / log alpha, the bump h_j
    (j a positive half-integer, possibly 1/2) is supported on v in [j-1, j],
    rises on [j-1, j-1/2] and falls on [j-1/2, j]. Adjacent bumps h_j and
    h_{j+1/2} sum to 1 on their overlap, so sum over j = 1/2, ..., J + 1/2 is
    1 on [1/r, 1/3] while sum over j = 1, ..., J stays below the indicator of
    that interval.
    """

    r: float
    J: int

    def __post_init__(self):
        if self.r <= 3:
            raise ValueError("r must exceed 3")
        if self.J < 1:
            raise ValueError("J must be at least 1")

    @property
    def alpha(self) -> float:
        return (self.r / 3.0) ** (1.0 / self.J)

    def point(self, j: float, x: float) -> float:
        """z_j = x^(alpha^j / r)."""
        return x ** (self.alpha**j / self.r)

    def v(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, np.log(self.r * np.maximum(t, 1e-300)) / math.log(self.alpha), -np.inf)

    def bump(self, j: float, t) -> np.ndarray:
        v = self.v(t)
        rise = smoothstep(2.0 * (v - j + 1.0))
        fall = 1.0 - smoothstep(2.0 * (v - j + 0.5))
        return np.where(v <= j - 0.5, rise, fall) * ((v >= j - 1) & (v <= j))

    @property
    def lower_indices(self) -> list[float]:
        return [1 + k / 2 for k in range(2 * self.J - 1)]

    @property
    def upper_indices(self) -> list[float]:
        return [0.5 + k / 2 for k in range(2 * self.J + 1)]

    def lower(self, t) -> np.ndarray:
        return sum(self.bump(j, t) for j in self.lower_indices)

    def upper(self, t) -> np.ndarray:
        return sum(self.bump(j, t) for j in self.upper_indices)
