"""The sieved sequence a_n = lambda_C(n) f(log n / log x) / n and its decompositions.

Also the exact character pairing behind the large-sieve bound, and searches
for the least split prime in each ideal class.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy

from .betasieve import SiftableSequence, buchstab_split
from .classgroup import (
    ClassGroup,
    CoefficientTable,
    MAX_TABLE,
    build_coefficients,
    enumerate_class_group,
    find_representation,
    kronecker_chi,
    L1_exact,
    prime_ideal_class,
)
from .multiplicative import density_g
from .primes import factorize, least_prime_factor, prime_sieve, primes_in_range
from .window import GeometricPartition, SmoothWindow


@lru_cache(maxsize=8)
def _coefficients(D: int, N: int) -> CoefficientTable:
    return build_coefficients(enumerate_class_group(D), N)


# ---------------------------------------------------------------- sequence


@dataclass(frozen=True)
class LinnikSequence(SiftableSequence):
    """a_n for one ideal class, or for the principal character when class_index is None.

    The principal version carries lambda_0 = sum_C lambda_C, so dividing it
    by h gives the class average.
    """

    D: int = 0
    h: int = 1
    class_index: int | None = None
    x: float = 0.0
    nu: float = 0.0
    window: SmoothWindow | None = None

    @property
    def is_principal(self) -> bool:
        return self.class_index is None


def default_window(nu: float) -> SmoothWindow:
    return SmoothWindow(1.0 - nu, 1.0)


def build_sequence(
    G: ClassGroup,
    class_index: int | None,
    x: float,
    nu: float,
    window: SmoothWindow | None = None,
    table: CoefficientTable | None = None,
) -> LinnikSequence:
    if not 0 < nu < 1:
        raise ValueError(f"nu must lie in (0, 1), got {nu}")
    if x < 2:
        raise ValueError(f"x must be at least 2, got {x}")
    if x > MAX_TABLE:
        raise OverflowError(f"x={x} exceeds the coefficient table capacity {MAX_TABLE}")
    if x < G.D:
        warnings.warn(f"x={x} is below D={G.D}", RuntimeWarning)
    if class_index is not None and not 0 <= class_index < G.h:
        raise ValueError(f"class index {class_index} out of range for h={G.h}")
    window = default_window(nu) if window is None else window
    N = int(math.floor(x))
    T = table if table is not None and table.N >= N else _coefficients(G.D, N)
    lam = T.lam0 if class_index is None else T.lamC[class_index]
    n = np.arange(N + 1, dtype=np.float64)
    terms = np.zeros(N + 1)
    lo = max(1, math.ceil(x ** (1 - nu)))
    u = np.log(n[lo:]) / math.log(x)
    terms[lo:] = lam[lo : N + 1] * window(u) / n[lo:]
    tag = f"D={G.D},class={'chi0' if class_index is None else class_index},x={x:g},nu={nu:g}"
    return LinnikSequence(terms, tag, G.D, G.h, class_index, float(x), float(nu), window)


def class_average(sequences: list[LinnikSequence]) -> SiftableSequence:
    """b_n = (1/h) sum_C a_n(C)."""
    h = len(sequences)
    return SiftableSequence(sum(s.terms for s in sequences) / h, "class-average")


# ---------------------------------------------------------------- congruence sums


@dataclass(frozen=True)
class CongruenceRow:
    d: int
    A_d: float
    main: float
    r_d: float


@dataclass(frozen=True)
class CongruenceReport:
    """A_d = g(d) X / h + r_d (class sequence) or g(d) X + r_d (principal)."""

    D: int
    x: float
    X: float
    rows: tuple[CongruenceRow, ...]

    def residuals(self) -> np.ndarray:
        return np.array([row.r_d for row in self.rows])


def main_term_scale(A: LinnikSequence) -> float:
    """X = L(1, chi_D) * f_hat(0) * log x."""
    G = enumerate_class_group(A.D)
    return L1_exact(G) * A.window.mass * math.log(A.x)


def congruence_row(A: LinnikSequence, d: int, X: float | None = None) -> CongruenceRow:
    X = main_term_scale(A) if X is None else X
    g = float(density_g(A.D, d))
    main = g * X if A.is_principal else g * X / A.h
    Ad = A.congruence_sum(d)
    return CongruenceRow(d, Ad, main, Ad - main)


def congruence_sums(A: LinnikSequence, dmax: int) -> CongruenceReport:
    """Rows for every squarefree d <= dmax."""
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    if dmax > A.x ** (1 - A.nu):
        raise ValueError(f"dmax={dmax} exceeds x^(1-nu)={A.x ** (1 - A.nu):.6g}")
    X = main_term_scale(A)
    rows = tuple(
        congruence_row(A, d, X) for d in range(1, dmax + 1) if all(e == 1 for e in factorize(d).values())
    )
    return CongruenceReport(A.D, A.x, X, rows)


# ---------------------------------------------------------------- S3 and its smooth brackets


@dataclass(frozen=True)
class S3Report:
    r: float
    J: int
    S3: float
    V: float
    V_prime: float
    V_double_prime: float
    W_minus: float
    W_plus: float
    terms: int
    partition_counts: tuple[int, int, int]

    @property
    def partition_residual(self) -> float:
        scale = max(abs(self.S3), 1e-300)
        return abs(self.S3 - (self.V + self.V_prime + self.V_double_prime)) / scale

    @property
    def bracket_holds(self) -> bool:
        return self.W_minus <= self.V <= self.W_plus

    @property
    def gaps(self) -> tuple[float, float]:
        """(V - W^-, W^+ - V) relative to V."""
        if self.V == 0:
            return (0.0, 0.0)
        return ((self.V - self.W_minus) / self.V, (self.W_plus - self.V) / self.V)


def _bracket(a: np.ndarray, lpf: np.ndarray, p2s: np.ndarray, weights: np.ndarray, p1s: np.ndarray, Z: float, rx: float) -> float:
    """sum_{p2} w(p2) sum_{Z < p1 < sqrt x} sum_{b >= Z, lpf(b) >= Z, (b, p1 p2) = 1} a_{p1 p2 b}."""
    N = a.size - 1
    total = 0.0
    p1s = p1s[(p1s > Z) & (p1s < rx)]
    for p2, w in zip(p2s.tolist(), weights.tolist()):
        if w == 0.0:
            continue
        inner = 0.0
        for p1 in p1s.tolist():
            if p1 == p2:
                continue
            q = p1 * p2
            top = N // q
            if top < Z:
                break
            b = np.arange(1, top + 1)
            keep = (b >= Z) & (lpf[1 : top + 1] >= Z) & (b % p1 != 0) & (b % p2 != 0)
            inner += a[q::q][keep].sum()
        total += w * inner
    return float(total)


def s3_partition(A: SiftableSequence, x: float, r: float, J: int, rtol: float = 1e-9) -> S3Report:
    """S3 split into V + V' + V'' and bracketed by the decoupled sums W^- <= V <= W^+.

    V' holds the b = 1 terms, V'' the terms with (b, p1 p2) > 1 and V the
    rest. The brackets replace the conditions tying p1 and b to p2 by
    conditions at the partition points z_j, weighted by the bumps h_j of a
    GeometricPartition(r, J). For r <= 3 every p1 p2 b with b > 1 exceeds x,
    so V = V'' = 0 and both brackets are 0 without a partition.
    """
    z = x ** (1.0 / r)
    if z < 2:
        raise ValueError(f"x^(1/r) = {z:.4g} is below 2")
    if x > A.N:
        raise ValueError(f"x={x} exceeds the sequence range N={A.N}")
    if J < 1:
        raise ValueError("J must be at least 1")
    P = GeometricPartition(r, J) if r > 3 else None
    a, lpf = A.terms, A.lpf
    N = A.N
    rx = math.sqrt(x)
    primes = prime_sieve(math.ceil(rx))
    primes = primes[(primes >= z) & (primes < rx)]
    pl = primes.tolist()
    S3 = V = V1 = V2 = 0.0
    counts = [0, 0, 0]
    nterms = 0
    for i, p1 in enumerate(pl):
        for p2 in pl[:i]:
            q = p1 * p2
            top = N // q
            if top < 1:
                break
            b = np.arange(1, top + 1)
            sel = lpf[1 : top + 1] >= p2
            t = a[q::q]
            one = sel & (b == 1)
            shared = sel & (b != 1) & ((b % p1 == 0) | (b % p2 == 0))
            rest = sel & ~one & ~shared
            S3 += t[sel].sum()
            V1 += t[one].sum()
            V2 += t[shared].sum()
            V += t[rest].sum()
            counts[0] += int(rest.sum())
            counts[1] += int(one.sum())
            counts[2] += int(shared.sum())
            nterms += int(sel.sum())
    if sum(counts) != nterms:
        raise AssertionError("V, V', V'' index sets do not partition the S3 terms")
    all_primes = prime_sieve(math.ceil(rx))
    logx = math.log(x)
    Wm = Wp = 0.0
    for j in P.upper_indices if P is not None else []:
        lo, hi = P.point(j - 1, x), P.point(j, x)
        p2s = all_primes[(all_primes >= math.floor(lo)) & (all_primes <= math.ceil(hi))]
        w = P.bump(j, np.log(p2s) / logx) if p2s.size else np.zeros(0)
        Wp += _bracket(a, lpf, p2s, np.asarray(w, dtype=np.float64), all_primes, lo, rx)
        if j in P.lower_indices:
            Wm += _bracket(a, lpf, p2s, np.asarray(w, dtype=np.float64), all_primes, hi, rx)
    out = S3Report(float(r), int(J), float(S3), float(V), float(V1), float(V2), float(Wm), float(Wp), nterms, tuple(counts))
    if out.partition_residual > rtol:
        raise AssertionError(f"S3 partition residual {out.partition_residual:.3e} exceeds {rtol}")
    if not out.bracket_holds:
        raise AssertionError(f"bracket failed: W- = {Wm!r}, V = {V!r}, W+ = {Wp!r}")
    return out


@dataclass(frozen=True)
class DecompositionReport:
    x: float
    r: float
    z: float
    S1: float
    S2: float
    S3: float
    sifted: float
    residual: float


def decompose(A: SiftableSequence, x: float, r: float) -> DecompositionReport:
    z = x ** (1.0 / r)
    b = buchstab_split(A, z, x)
    return DecompositionReport(x, r, z, b.S1, b.S2, b.S3, b.target, b.relative_residual)


# ---------------------------------------------------------------- character pairing


def character_pairing(T: CoefficientTable, n1: int, n2: int) -> tuple[int, int]:
    """(sum_chi lambda_chi(n1) conj(lambda_chi(n2)), h * sum_C lambda_C(n1) lambda_C(n2)).

    The two must agree; the character side is rounded from complex arithmetic
    after checking it sits on an integer.
    """
    if not (1 <= n1 <= T.N and 1 <= n2 <= T.N):
        raise ValueError(f"n1, n2 must lie in [1, {T.N}]")
    h = T.group.h
    val = complex(np.sum(T.lamChi[:, n1] * np.conj(T.lamChi[:, n2])))
    if abs(val.imag) > 1e-9 * h or abs(val.real - round(val.real)) > 1e-9 * h:
        raise AssertionError(f"character sum {val} is not an integer")
    lhs = int(round(val.real))
    rhs = h * int(np.dot(T.lamC[:, n1], T.lamC[:, n2]))
    if lhs != rhs:
        raise AssertionError(f"pairing mismatch at ({n1}, {n2}): {lhs} != {rhs}")
    return lhs, rhs


def pairing_mismatches(T: CoefficientTable, nmax: int) -> int:
    """Number of (n1, n2) in [1, nmax]^2 where the pairing identity fails."""
    if nmax > T.N:
        raise ValueError(f"nmax={nmax} exceeds table range N={T.N}")
    h = T.group.h
    L = T.lamChi[:, 1 : nmax + 1]
    M = L.T @ L.conj()
    C = T.lamC[:, 1 : nmax + 1].astype(np.float64)
    exact = h * (C.T @ C)
    rounded = np.round(M.real)
    off = (np.abs(M.imag) > 1e-9 * h) | (np.abs(M.real - rounded) > 1e-9 * h)
    return int(np.count_nonzero(off | (rounded != exact)))


def large_sieve_quantity(T: CoefficientTable, alpha1: float, alpha2: float, r: float, x: float, coeffs) -> dict:
    """sum_chi |sum_{x^a1 <= n <= x^a2, (n, P(z)) = 1} c_n lambda_chi(n) / n|^2 with z = x^(1/r).

    ``coeffs`` maps an integer array n to complex c_n with |c_n| <= 1. The
    ratio to (alpha2 - alpha1)^2 r^2 is reported, not bounded.
    """
    lo = math.ceil(x**alpha1)
    hi = math.floor(x**alpha2)
    if lo < 2:
        raise ValueError("x^alpha1 must be at least 2")
    if hi > T.N:
        raise ValueError(f"x^alpha2 = {hi} exceeds table range N={T.N}")
    z = x ** (1.0 / r)
    if hi < lo:
        return {"value": 0.0, "ratio": 0.0, "terms": 0}
    n = np.arange(lo, hi + 1)
    lpf = least_prime_factor(hi)
    n = n[lpf[lo : hi + 1] >= z]
    c = np.asarray(coeffs(n), dtype=np.complex128)
    if np.any(np.abs(c) > 1 + 1e-12):
        raise ValueError("coefficients must satisfy |c_n| <= 1")
    inner = T.lamChi[:, n] @ (c / n)
    value = float(np.sum(np.abs(inner) ** 2))
    return {"value": value, "ratio": value / ((alpha2 - alpha1) ** 2 * r**2), "terms": int(n.size)}


# ---------------------------------------------------------------- least primes


@dataclass(frozen=True)
class LeastPrimeRow:
    D: int
    class_index: int
    form: tuple[int, int, int]
    p: int | None
    exponent: float | None
    witness: tuple[int, int] | None

    def as_dict(self) -> dict:
        return {
            "D": self.D,
            "class": self.class_index,
            "form": list(self.form),
            "p": self.p,
            "exponent": None if self.exponent is None else round(self.exponent, 6),
            "witness": None if self.witness is None else list(self.witness),
        }


@dataclass(frozen=True)
class LeastPrimeTable:
    D: int
    pmax: int
    rows: tuple[LeastPrimeRow, ...]

    @property
    def resolved(self) -> bool:
        return all(row.p is not None for row in self.rows)

    @property
    def max_prime(self) -> int | None:
        ps = [row.p for row in self.rows]
        return None if None in ps else max(ps)


def certify(G: ClassGroup, row: LeastPrimeRow) -> bool:
    """Independent check: p prime, split, and form(witness) = p."""
    if row.p is None or row.witness is None:
        return False
    f = G.elements[row.class_index]
    return bool(sympy.isprime(row.p)) and kronecker_chi(G.D, row.p) == 1 and f(*row.witness) == row.p


def least_prime_search(G: ClassGroup, pmax: int) -> LeastPrimeTable:
    """Least split prime p <= pmax with a prime ideal of norm p in each class.

    The ramified prime D is not split and never qualifies.
    """
    D, h = G.D, G.h
    found: dict[int, int] = {}
    # least primes are usually tiny, so sieve in windows that double in width
    lo, width = 2, 1 << 12
    while lo <= pmax and len(found) < h:
        hi = min(pmax + 1, lo + width)
        chunk = primes_in_range(lo, hi)
        lo, width = hi, width * 2
        chi = kronecker_table_for(D)[chunk % D]
        for p in chunk[chi == 1].tolist():
            if p == 2 and D % 8 != 7:
                continue
            i, j = prime_ideal_class(G, p)
            found.setdefault(i, p)
            found.setdefault(j, p)
            if len(found) == h:
                break
    rows = []
    for k, form in enumerate(G.elements):
        p = found.get(k)
        wit = find_representation(form, p) if p is not None else None
        rows.append(
            LeastPrimeRow(D, k, (form.a, form.b, form.c), p, None if p is None else math.log(p) / math.log(D), wit)
        )
    return LeastPrimeTable(D, pmax, tuple(rows))


@lru_cache(maxsize=64)
def kronecker_table_for(D: int) -> np.ndarray:
    from .classgroup import kronecker_table

    return kronecker_table(D, D - 1)


@dataclass(frozen=True)
class SurveyRow:
    D: int
    h: int
    max_p: int | None
    exponent: float | None
    certified: bool


def survey_discriminants(dmin: int, dmax: int) -> list[int]:
    return [int(D) for D in prime_sieve(dmax) if D >= max(dmin, 7) and D % 4 == 3]


def survey_row(D: int, pcap: int) -> SurveyRow:
    """max_C p(D, C) for one discriminant; failures come back as an uncertified row."""
    try:
        G = enumerate_class_group(D)
        table = least_prime_search(G, pcap)
        ok = table.resolved and all(certify(G, row) for row in table.rows)
        mp = table.max_prime
        return SurveyRow(D, G.h, mp, None if mp is None else math.log(mp) / math.log(D), ok)
    except Exception as exc:  # keep surveying; the row records the failure
        warnings.warn(f"D={D}: {exc}", RuntimeWarning)
        return SurveyRow(D, 0, None, None, False)


def exponent_survey(dmin: int, dmax: int, pcap: int, on_row=None, threads: int = 1) -> tuple[list[SurveyRow], dict]:
    """max_C p(D, C) and log(max p) / log D for each prime D = 3 mod 4 in [dmin, dmax].

    Rows come back in increasing D whatever ``threads`` is; ``on_row`` sees
    each one as soon as it and all its predecessors are done.
    """
    rows = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for row in pool.map(lambda D: survey_row(D, pcap), survey_discriminants(dmin, dmax)):
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return rows, survey_summary(rows)


def survey_summary(rows: list[SurveyRow]) -> dict:
    exps = [row.exponent for row in rows if row.exponent is not None]
    return {
        "count": len(rows),
        "resolved": sum(row.max_p is not None for row in rows),
        "certified": sum(row.certified for row in rows),
        "max_exponent": max(exps) if exps else None,
        "argmax_D": max((row for row in rows if row.exponent is not None), key=lambda row: row.exponent).D if exps else None,
    }


def parameter_schedule(r: float, c: float = 0.0875) -> dict:
    """The asymptotic choices k = sqrt(r), theta = c / r^2, nu = exp(-r / 20).

    ``log10_x_over_log10_D`` = 1 / theta shows how far these sit from desk scale.
    """
    theta = c / r**2
    return {"r": r, "k": math.sqrt(r), "theta": theta, "nu": math.exp(-r / 20), "log10_x_over_log10_D": 1 / theta}
