"""Sifting density, Mertens-type products and truncated Euler products at s = 1.

The density attached to the ideal-count sequence is

    g(d) = (1/d) * sum_{q | d} mu(q) chi_D(q) lambda_0(d/q) / q,

with lambda_0(n) = sum_{e | n} chi_D(e). On primes this collapses to
1 - g(p) = (1 - 1/p)(1 - chi_D(p)/p), which is what the product routines use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classgroup import check_discriminant, kronecker_chi, kronecker_table
from .primes import divisors, factorize, mobius, prime_sieve, segmented_primes


def _lambda0(D: int, n: int) -> int:
    return sum(kronecker_chi(D, e) for e in divisors(n))


def density_g(D: int, d: int) -> Fraction:
    """Exact g(d) for squarefree d >= 1."""
    D = check_discriminant(D)
    if d < 1 or any(e > 1 for e in factorize(d).values()):
        raise ValueError(f"d must be a squarefree positive integer, got {d}")
    total = Fraction(0)
    for q in divisors(d):
        mu = mobius(q)
        if mu:
            total += Fraction(mu * kronecker_chi(D, q) * _lambda0(D, d // q), q)
    return total / d


def one_minus_g(D: int, p: int) -> Fraction:
    """(1 - 1/p)(1 - chi_D(p)/p), the closed form of 1 - g(p)."""
    return (1 - Fraction(1, p)) * (1 - Fraction(kronecker_chi(D, p), p))


def _chi_on(D: int, p: np.ndarray) -> np.ndarray:
    period = kronecker_table(D, D - 1).astype(np.int64)
    return period[p % D]


def _log_one_minus_g(D: int, p: np.ndarray) -> np.ndarray:
    pf = p.astype(np.float64)
    return np.log1p(-1.0 / pf) + np.log1p(-_chi_on(D, p) / pf)


@dataclass(frozen=True)
class MertensProduct:
    """V(z) = prod_{p < z} (1 - g(p)) with its dimension witness.

    ``witness_K`` is the least K making
    prod_{w <= p < z} (1 - g(p))^{-1} <= K (log z / log w)^kappa
    hold for every 2 <= w < z; ``witness_w`` is where it is attained.
    """

    D: int
    z: float
    V: float
    kappa: float
    witness_K: float
    witness_w: int


def mertens_V(D: int, z: float, kappa: float = 2.0) -> MertensProduct:
    D = check_discriminant(D)
    if z < 2:
        raise ValueError(f"z must be at least 2, got {z}")
    p = prime_sieve(math.ceil(z) - 1)
    p = p[p < z]
    if p.size == 0:
        return MertensProduct(D, z, 1.0, kappa, 1.0, 2)
    logs = _log_one_minus_g(D, p)
    logV = float(np.sum(logs))
    # -log prod_{w <= p < z} (1 - g) for w running over the primes below z;
    # between consecutive primes the ratio only grows with w, so primes suffice
    tail = -np.cumsum(logs[::-1])[::-1]
    ratio = tail - kappa * (math.log(math.log(z)) - np.log(np.log(p.astype(np.float64))))
    k = int(np.argmax(ratio))
    return MertensProduct(D, z, math.exp(logV), kappa, math.exp(float(ratio[k])), int(p[k]))


@dataclass(frozen=True)
class EulerProductState:
    """E(x) = prod_{p < x} (1 - chi_D(p)/p)^{-1} and eta = log(L(1, chi_D) / E)."""

    D: int
    x: float
    E: float
    L1: float
    eta: float

    def as_dict(self) -> dict:
        return {"D": self.D, "x": self.x, "E": self.E, "L1": self.L1, "eta": self.eta}


def log_euler_product(D: int, x: float) -> float:
    """log E(x), accumulated segment by segment in a fixed order."""
    total = 0.0
    for p in segmented_primes(2, math.ceil(x)):
        p = p[p < x]
        total -= float(np.sum(np.log1p(-_chi_on(D, p) / p.astype(np.float64))))
    return total


def L1_reference(D: int) -> float:
    from .classgroup import reduced_forms

    return math.pi * len(reduced_forms(D)) / math.sqrt(D)


def euler_product(D: int, x: float) -> EulerProductState:
    D = check_discriminant(D)
    if x < 2:
        raise ValueError(f"x must be at least 2, got {x}")
    logE = log_euler_product(D, x)
    L1 = L1_reference(D)
    return EulerProductState(D, float(x), math.exp(logE), L1, math.log(L1) - logE)


def _prime_sum(D: int, lo: float, hi: float, weight) -> float:
    total = 0.0
    for p in segmented_primes(math.ceil(lo), math.ceil(hi)):
        p = p[(p >= lo) & (p < hi)]
        total += float(np.sum(weight(_chi_on(D, p)) / p.astype(np.float64)))
    return total


def delta_sum(D: int, z: float, w: float) -> float:
    """sum_{z <= p < w} (1 + chi_D(p)) / p."""
    D = check_discriminant(D)
    if z < 2 or w < z:
        raise ValueError(f"need 2 <= z <= w, got z={z}, w={w}")
    return _prime_sum(D, z, w, lambda c: 1.0 + c)


def chi_prime_sum(D: int, lo: float, hi: float) -> float:
    """sum_{lo <= p < hi} chi_D(p) / p."""
    D = check_discriminant(D)
    if lo < 2 or hi < lo:
        raise ValueError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    return _prime_sum(D, lo, hi, lambda c: c.astype(np.float64))
