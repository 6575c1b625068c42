"""Beta-sieve weights, sifted sums, the double Buchstab split and the sieve functions F, f.

Weights follow the Rosser-Iwaniec truncation: a squarefree d = p_1 p_2 ... p_r
with z > p_1 > ... > p_r keeps xi_d = mu(d) iff

    p_1 ... p_{m-1} * p_m ** (beta + 1) < y

for every odd m (upper weights) or every even m (lower weights). Both
conditions are prefix-closed, so the set is enumerated by a depth-first walk
that prunes a branch as soon as its condition fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .primes import least_prime_factor, prime_sieve

# (beta, A) for the supported sieve dimensions
SIEVE_CONSTANTS: dict[int, tuple[float, float]] = {
    1: (2.0, 2.0 * math.exp(0.5772156649015329)),
    2: (4.8339865967, 43.4968874616),
}


def sieve_constants(kappa: int) -> tuple[float, float]:
    try:
        return SIEVE_CONSTANTS[int(kappa)] if kappa == int(kappa) else SIEVE_CONSTANTS[kappa]
    except KeyError:
        raise ValueError(f"sieve dimension {kappa} unsupported; choose one of {sorted(SIEVE_CONSTANTS)}") from None


# ---------------------------------------------------------------- weights


@dataclass(frozen=True)
class SieveWeightSet:
    """Beta-sieve weights of level y for the primes below z.

    ``divisors`` is sorted and ``weights[i]`` is xi at ``divisors[i]``; every
    d not listed has xi_d = 0.
    """

    kappa: int
    beta: float
    y: float
    z: float
    sign: str
    divisors: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.divisors.size)

    def as_dict(self) -> dict[int, int]:
        return {int(d): int(w) for d, w in zip(self.divisors, self.weights)}

    def theta(self, N: int) -> np.ndarray:
        """theta_n = sum_{d | n} xi_d for 0 <= n <= N (theta_0 unused)."""
        out = np.zeros(N + 1, dtype=np.int64)
        for d, w in zip(self.divisors.tolist(), self.weights.tolist()):
            if d <= N:
                out[d::d] += w
        out[0] = 0
        return out


def _walk(primes: list[int], y: float, beta: float, check_odd: bool) -> list[tuple[int, int]]:
    out = [(1, 1)]
    stack = [(1, 0, len(primes))]  # (product so far, depth, primes allowed below index)
    while stack:
        d, depth, hi = stack.pop()
        m = depth + 1
        checked = (m % 2 == 1) == check_odd
        for i in range(hi - 1, -1, -1):
            p = primes[i]
            if checked and d * p ** (beta + 1) >= y:
                continue
            nd = d * p
            if nd > y:
                continue
            out.append((nd, -1 if m % 2 else 1))
            stack.append((nd, m, i))
    return out


def build_weights(kappa: int, y: float, z: float, sign: str) -> SieveWeightSet:
    """Upper or lower beta-sieve weights.

    A lower sieve needs xi_p = -1 for every prime in [y, z), which is
    impossible with support in [1, y]; when z > y the lower weights are
    therefore all zero (theta^- = 0, the trivial lower bound).
    """
    beta, _ = sieve_constants(kappa)
    if sign not in ("upper", "lower"):
        raise ValueError(f"sign must be 'upper' or 'lower', got {sign!r}")
    if y < 1 or z < 2:
        raise ValueError(f"need y >= 1 and z >= 2, got y={y}, z={z}")
    if sign == "lower" and z > y:
        pairs: list[tuple[int, int]] = []
    else:
        primes = [int(p) for p in prime_sieve(math.ceil(z) - 1) if p < z]
        pairs = _walk(primes, y, beta, check_odd=(sign == "upper"))
    pairs.sort()
    divs = np.array([d for d, _ in pairs], dtype=np.int64)
    wts = np.array([w for _, w in pairs], dtype=np.int64)
    return SieveWeightSet(int(kappa), beta, float(y), float(z), sign, divs, wts)


def sandwich_violations(upper: SieveWeightSet, lower: SieveWeightSet, N: int) -> dict[str, int]:
    """Count n <= N where theta^- <= [gcd(n, P(z)) = 1] <= theta^+ fails."""
    if upper.z != lower.z:
        raise ValueError("upper and lower weights use different z")
    lpf = least_prime_factor(N)
    ind = (lpf[1:] >= upper.z).astype(np.int64)
    tp = upper.theta(N)[1:]
    tm = lower.theta(N)[1:]
    return {"upper": int(np.count_nonzero(tp < ind)), "lower": int(np.count_nonzero(tm > ind))}


# ---------------------------------------------------------------- sequences


@dataclass(frozen=True)
class SiftableSequence:
    """Nonnegative terms a_n for 1 <= n <= N, stored densely with a_0 = 0."""

    terms: np.ndarray = field(repr=False)
    tag: str = ""

    def __post_init__(self):
        t = np.asarray(self.terms, dtype=np.float64)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("terms must be a 1-d array covering n = 0..N")
        if np.any(t < 0):
            raise ValueError("sifted sequences must be nonnegative")
        t = t.copy()
        t[0] = 0.0
        t.setflags(write=False)
        object.__setattr__(self, "terms", t)

    @property
    def N(self) -> int:
        return self.terms.size - 1

    @cached_property
    def lpf(self) -> np.ndarray:
        return least_prime_factor(self.N)

    def congruence_sum(self, d: int) -> float:
        """A_d = sum over multiples of d."""
        return float(self.terms[d::d].sum()) if d <= self.N else 0.0

    def sifted(self, z: float) -> float:
        """S(A, z): the sum of a_n over n free of primes below z."""
        return float(self.terms[self.lpf >= z].sum())

    def __add__(self, other: "SiftableSequence") -> "SiftableSequence":
        return SiftableSequence(self.terms + other.terms, f"{self.tag}+{other.tag}")

    def scaled(self, c: float) -> "SiftableSequence":
        return SiftableSequence(c * self.terms, self.tag)


def sifted_sum(A: SiftableSequence, W: SieveWeightSet, check: bool = False, rtol: float = 1e-9) -> float:
    """sum_d xi_d A_d; with ``check`` also the direct sum_n a_n theta_n, which must agree."""
    total = 0.0
    for d, w in zip(W.divisors.tolist(), W.weights.tolist()):
        if d <= A.N:
            total += w * A.terms[d::d].sum()
    total = float(total)
    if check:
        direct = float(np.dot(A.terms, W.theta(A.N)))
        scale = max(abs(total), abs(direct), float(A.terms.sum()), 1e-300)
        if abs(total - direct) > rtol * scale:
            raise AssertionError(f"congruence order {total!r} and direct order {direct!r} disagree")
    return total


# ---------------------------------------------------------------- Buchstab


@dataclass(frozen=True)
class BuchstabSplit:
    S1: float
    S2: float
    S3: float
    target: float
    residual: float

    @property
    def relative_residual(self) -> float:
        scale = max(abs(self.target), abs(self.S1), abs(self.S2), abs(self.S3), 1e-300)
        return self.residual / scale


def buchstab_split(A: SiftableSequence, z: float, x: float, rtol: float = 1e-9) -> BuchstabSplit:
    """Split S(A, sqrt x) into S1 + S2 + S3 by two Buchstab iterations.

    S1 = S(A, z), S2 = -sum_{z <= p < sqrt x} S(A_p, z) and
    S3 = sum_{z <= p2 < p1 < sqrt x} S(A_{p1 p2}, p2), each by direct
    enumeration. Raises AssertionError if the identity fails beyond ``rtol``.
    """
    if x > A.N:
        raise ValueError(f"x={x} exceeds the sequence range N={A.N}")
    rx = math.sqrt(x)
    if not 2 <= z <= rx:
        raise ValueError(f"need 2 <= z <= sqrt(x), got z={z}, sqrt(x)={rx}")
    a, lpf = A.terms, A.lpf
    N = A.N
    primes = [int(p) for p in prime_sieve(math.ceil(rx)) if z <= p < rx]
    S1 = float(a[lpf >= z].sum())
    S2 = 0.0
    for p in primes:
        S2 -= a[p::p][lpf[1 : N // p + 1] >= z].sum()
    S3 = 0.0
    for i, p1 in enumerate(primes):
        for p2 in primes[:i]:
            q = p1 * p2
            if q > N:
                break
            S3 += a[q::q][lpf[1 : N // q + 1] >= p2].sum()
    target = float(a[lpf >= rx].sum())
    S2, S3 = float(S2), float(S3)
    out = BuchstabSplit(S1, S2, S3, target, abs(target - (S1 + S2 + S3)))
    if out.relative_residual > rtol:
        raise AssertionError(f"Buchstab identity residual {out.relative_residual:.3e} exceeds {rtol}")
    return out


# ---------------------------------------------------------------- sieve functions


class StepSizeError(RuntimeError):
    """The integration grid is too coarse for the requested accuracy."""


@dataclass(frozen=True)
class SieveFunctions:
    """Tabulated F(s), f(s) on the grid s = beta - 1 + k * step."""

    kappa: int
    beta: float
    A: float
    step: float
    s: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    error_estimate: float

    @property
    def s_max(self) -> float:
        return float(self.s[-1])

    def upper(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        self._check(s)
        return np.where(s <= self.beta + 1, self.A / np.maximum(s, 1e-300) ** self.kappa, np.interp(s, self.s, self.F))

    def lower(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        self._check(s)
        return np.where(s <= self.beta, 0.0, np.interp(s, self.s, self.f))

    def _check(self, s):
        if np.any(s <= 0) or np.any(s > self.s_max + 1e-12):
            raise ValueError(f"s must lie in (0, {self.s_max}]")


def _integrate(kappa: int, beta: float, A: float, s_max: float, n: int):
    """Solve on a grid with n steps per unit length, starting at beta - 1."""
    h = 1.0 / n
    K = int(math.ceil((s_max - (beta - 1)) * n))
    s = beta - 1 + h * np.arange(K + 1)
    F = np.empty(K + 1)
    f = np.empty(K + 1)
    # F known up to beta + 1 (index 2n), f zero up to beta (index n)
    F[: 2 * n + 1] = A / s[: 2 * n + 1] ** kappa
    f[: n + 1] = 0.0
    w = kappa * s ** (kappa - 1)
    # f on [beta+k, beta+k+1] needs F one unit back; F on [beta+1+k, ...] needs f one unit back
    f_done, F_done = n, 2 * n
    while f_done < K or F_done < K:
        if f_done < K:
            hi = min(f_done + n, K)
            g = w[f_done : hi + 1] * F[f_done - n : hi - n + 1]
            acc = np.concatenate(([0.0], np.cumsum(0.5 * h * (g[1:] + g[:-1]))))
            f[f_done : hi + 1] = (s[f_done] ** kappa * f[f_done] + acc) / s[f_done : hi + 1] ** kappa
            f_done = hi
        if F_done < K:
            hi = min(F_done + n, K, f_done + n)
            g = w[F_done : hi + 1] * f[F_done - n : hi - n + 1]
            acc = np.concatenate(([0.0], np.cumsum(0.5 * h * (g[1:] + g[:-1]))))
            F[F_done : hi + 1] = (s[F_done] ** kappa * F[F_done] + acc) / s[F_done : hi + 1] ** kappa
            F_done = hi
    return s, F, f


def solve_sieve_functions(
    kappa: int = 2,
    beta: float | None = None,
    A: float | None = None,
    s_max: float = 30.0,
    step: float = 1e-3,
    tol: float = 1e-6,
) -> SieveFunctions:
    """Integrate (s^k F)' = k s^(k-1) f(s-1), (s^k f)' = k s^(k-1) F(s-1).

    Seeds s^k F(s) = A on [beta - 1, beta + 1] and f = 0 up to beta, then
    advances with the trapezoid rule. The grid is aligned so that s - 1 is
    again a grid point. A second solve at twice the step gives a Richardson
    error estimate; if it exceeds ``tol`` the solve is refused.
    """
    b0, A0 = sieve_constants(kappa)
    beta = b0 if beta is None else beta
    A = A0 if A is None else A
    if s_max <= beta + 1:
        raise ValueError(f"s_max must exceed beta + 1 = {beta + 1}")
    n = int(round(1.0 / step))
    if n < 2 or abs(n * step - 1.0) > 1e-12:
        raise ValueError("step must be 1/n for an integer n >= 2")
    s, F, f = _integrate(kappa, beta, A, s_max, n)
    if n % 2 == 0:
        _, F2, f2 = _integrate(kappa, beta, A, s_max, n // 2)
        m = min(F2.size, (F.size + 1) // 2)
        err = max(np.max(np.abs(F[: 2 * m : 2] - F2[:m])), np.max(np.abs(f[: 2 * m : 2] - f2[:m]))) / 3.0
    else:
        _, F2, f2 = _integrate(kappa, beta, A, s_max, 2 * n)
        err = max(np.max(np.abs(F2[::2][: F.size] - F)), np.max(np.abs(f2[::2][: f.size] - f))) / 3.0
    err = float(err)
    if err > tol:
        raise StepSizeError(f"estimated error {err:.2e} exceeds {tol:.0e}; decrease step")
    for arr in (s, F, f):
        arr.setflags(write=False)
    return SieveFunctions(int(kappa), beta, A, step, s, F, f, err)
