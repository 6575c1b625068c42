"""Class groups of Q(sqrt(-D)) through reduced binary quadratic forms.

D is a prime with D = 3 (mod 4), so -D is a fundamental discriminant, the
unit group has order 2 and the class number h is odd. Classes are ordered
lexicographically by their reduced form (a, b, c); the principal class is
always index 0.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import cyclotomic as cyc
from .primes import factorize, is_prime, mobius_table


class DiscriminantError(ValueError):
    """D is not a prime congruent to 3 mod 4 exceeding 3."""


def check_discriminant(D: int) -> int:
    if not isinstance(D, (int, np.integer)) or isinstance(D, bool):
        raise DiscriminantError(f"D must be an integer, got {D!r}")
    D = int(D)
    if D <= 3:
        raise DiscriminantError(f"D must exceed 3, got {D}")
    if D % 4 != 3:
        raise DiscriminantError(f"D must be 3 mod 4, got {D}")
    if not is_prime(D):
        raise DiscriminantError(f"D must be prime, got {D}")
    return D


# ---------------------------------------------------------------- forms


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> "ReducedForm":
        return reduce_form(self.a, -self.b, self.c)

    def as_list(self) -> list[int]:
        return [self.a, self.b, self.c]


def reduce_form(a: int, b: int, c: int) -> ReducedForm:
    """Reduce a positive definite form to the unique reduced representative."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"({a}, {b}, {c}) is not positive definite")

    def normalize(a, b, c):
        r = (a - b) // (2 * a)
        return a, b + 2 * r * a, a * r * r + b * r + c

    a, b, c = normalize(a, b, c)
    while a > c or (a == c and b < 0):
        if a > c:
            a, b, c = normalize(c, -b, a)
        else:
            b = -b
    return ReducedForm(a, b, c)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose(f1: ReducedForm, f2: ReducedForm) -> ReducedForm:
    """Dirichlet composition of primitive forms of equal discriminant, then reduction."""
    if f1.disc != f2.disc:
        raise ValueError("forms have different discriminants")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, _ = f1.a, f1.b, f1.c
    a2, b2, c2 = f2.a, f2.b, f2.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        x2, y2, d1 = 0, -1, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - f1.disc) // (4 * a3)
    return reduce_form(a3, b3, c3)


def reduced_forms(D: int) -> list[ReducedForm]:
    """All reduced forms of discriminant -D, lexicographic on (a, b, c)."""
    out = []
    amax = math.isqrt(D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + D) % (4 * a):
                continue
            c = (b * b + D) // (4 * a)
            f = ReducedForm(a, b, c)
            if f.is_reduced():
                out.append(f)
    return sorted(out)


# ---------------------------------------------------------------- group


def element_order(table: np.ndarray, g: int) -> int:
    k, x = 1, g
    while x != 0:
        x = table[x, g]
        k += 1
    return k


def _power(table: np.ndarray, g: int, k: int) -> int:
    x = 0
    for _ in range(k):
        x = table[x, g]
    return x


def _sylow_basis(table: np.ndarray, p: int) -> list[tuple[int, int]]:
    """Basis (generator, order) of the p-Sylow subgroup of an abelian group."""
    h = table.shape[0]
    orders = [element_order(table, g) for g in range(h)]
    sylow = [g for g in range(h) if orders[g] == p ** round(math.log(orders[g], p))]
    basis: list[tuple[int, int]] = []
    span = {0}

    def quotient_order(g):
        k, x = 1, g
        while x not in span:
            x = table[x, g]
            k += 1
        return k

    while len(span) < len(sylow):
        g = max(sylow, key=lambda e: (quotient_order(e), -e))
        m = quotient_order(g)
        target = _power(table, g, m)
        # pick s in span with s^m = g^m, so g * s^-1 has order exactly m
        s = next(s for s in sorted(span) if _power(table, s, m) == target)
        s_inv = next(t for t in range(h) if table[s, t] == 0)
        g = int(table[g, s_inv])
        basis.append((g, m))
        new = set()
        x = 0
        for _ in range(m):
            new |= {int(table[x, t]) for t in span}
            x = table[x, g]
        span = new
    return basis


@dataclass(frozen=True)
class ClassGroup:
    """Class group of discriminant -D.

    Attributes:
        D: the prime D.
        elements: reduced forms in lexicographic order (principal form first).
        table: composition table, table[i, j] = index of elements[i] * elements[j].
        structure: invariant-factor orders n_1, ..., n_k with product h.
        generators: element indices of the matching cyclic generators.
    """

    D: int
    elements: tuple[ReducedForm, ...]
    table: np.ndarray = field(repr=False, compare=False)
    structure: tuple[int, ...]
    generators: tuple[int, ...]

    @property
    def h(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict[ReducedForm, int]:
        return {f: i for i, f in enumerate(self.elements)}

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.structure) if self.structure else 1

    @cached_property
    def coordinates(self) -> np.ndarray:
        """coords[i] = exponent vector of element i over the generators."""
        coords = np.zeros((self.h, len(self.structure)), dtype=np.int64)
        for exps in product(*(range(n) for n in self.structure)):
            x = 0
            for g, e in zip(self.generators, exps):
                x = int(self.table[x, _power(self.table, g, e)])
            coords[x] = exps
        return coords

    def inverse_index(self, i: int) -> int:
        return self.index[self.elements[i].inverse()]

    def class_of(self, form: tuple[int, int, int]) -> int:
        return self.index[reduce_form(*form)]

    @cached_property
    def characters(self) -> tuple["ClassCharacter", ...]:
        out = []
        m = self.exponent
        for k, ks in enumerate(product(*(range(n) for n in self.structure))):
            exps = np.zeros(self.h, dtype=np.int64)
            for ki, ni, col in zip(ks, self.structure, self.coordinates.T):
                exps = (exps + ki * (m // ni) * col) % m
            out.append(ClassCharacter(self, k, tuple(ks), exps))
        return tuple(out)

    def to_json(self) -> str:
        return json.dumps(
            {
                "D": self.D,
                "h": self.h,
                "forms": [f.as_list() for f in self.elements],
                "structure": list(self.structure),
                "generators": list(self.generators),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ClassGroup":
        doc = json.loads(text)
        G = enumerate_class_group(doc["D"])
        if [f.as_list() for f in G.elements] != doc["forms"] or G.h != doc["h"]:
            raise ValueError(f"cached class group for D={doc['D']} does not match recomputation")
        return G


@dataclass(frozen=True)
class ClassCharacter:
    """chi(C_i) = zeta_m ** exponents[i] with m the group exponent."""

    group: ClassGroup = field(repr=False)
    index: int
    label: tuple[int, ...]
    exponents: np.ndarray = field(repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.group.exponent

    @property
    def values(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.exponents / self.m)

    def __call__(self, i: int) -> complex:
        return complex(self.values[i])

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.exponents)


def enumerate_class_group(D: int) -> ClassGroup:
    D = check_discriminant(D)
    forms = reduced_forms(D)
    h = len(forms)
    index = {f: i for i, f in enumerate(forms)}
    table = np.zeros((h, h), dtype=np.int64)
    for i in range(h):
        for j in range(i, h):
            k = index[compose(forms[i], forms[j])]
            table[i, j] = table[j, i] = k
    table.setflags(write=False)
    # invariant factors from the Sylow bases: factor t multiplies the t-th
    # largest cyclic piece of every p-part
    pieces = {p: sorted(_sylow_basis(table, p), key=lambda gm: -gm[1]) for p in factorize(h)} if h > 1 else {}
    width = max((len(v) for v in pieces.values()), default=0)
    structure, generators = [], []
    for t in range(width):
        g, n = 0, 1
        for p in sorted(pieces):
            if t < len(pieces[p]):
                gp, m = pieces[p][t]
                g = int(table[g, gp])
                n *= m
        structure.append(n)
        generators.append(g)
    return ClassGroup(D, tuple(forms), table, tuple(structure), tuple(generators))


# ---------------------------------------------------------------- Kronecker symbol


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a / n) for n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    k = 1 if v % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def kronecker_chi(D: int, n: int) -> int:
    """chi_D(n) = (-D / n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return kronecker(-D, n)


def kronecker_table(D: int, N: int) -> np.ndarray:
    """chi_D(n) for 0 <= n <= N as int8.

    For prime D = 3 mod 4 the symbol is the Legendre symbol (n / D), so one
    period of quadratic residues suffices.
    """
    residues = np.full(D, -1, dtype=np.int8)
    residues[(np.arange(1, D, dtype=np.int64) ** 2) % D] = 1
    residues[0] = 0
    out = residues[np.arange(N + 1) % D]
    out[0] = kronecker_chi(D, 0)
    return out


# ---------------------------------------------------------------- coefficients


MAX_TABLE = 50_000_000


def representation_counts(form: ReducedForm, N: int) -> np.ndarray:
    """r_f(n) = #{(x, y) in Z^2 : f(x, y) = n} for 0 <= n <= N."""
    a, b, c = form.a, form.b, form.c
    D = -form.disc
    counts = np.zeros(N + 1, dtype=np.int64)
    ymax = math.isqrt(4 * a * N // D) + 1
    for y in range(-ymax, ymax + 1):
        disc = 4 * a * N - D * y * y
        if disc < 0:
            continue
        r = math.isqrt(disc)
        xlo = (-b * y - r) // (2 * a) - 1
        xhi = (-b * y + r) // (2 * a) + 1
        x = np.arange(xlo, xhi + 1, dtype=np.int64)
        vals = a * x * x + b * x * y + c * y * y
        vals = vals[(vals >= 0) & (vals <= N)]
        counts += np.bincount(vals, minlength=N + 1)
    return counts


@dataclass(frozen=True)
class CoefficientTable:
    """lambda_C(n), chi_D(n) and the character sums lambda_chi(n) for n <= N."""

    group: ClassGroup = field(repr=False)
    N: int
    lamC: np.ndarray = field(repr=False)
    kron: np.ndarray = field(repr=False)

    @property
    def D(self) -> int:
        return self.group.D

    @cached_property
    def lam0(self) -> np.ndarray:
        return self.lamC.sum(axis=0)

    @cached_property
    def lamChi(self) -> np.ndarray:
        """Complex array of shape (h, N + 1); row k is lambda_{chi_k}."""
        vals = np.array([chi.values for chi in self.group.characters])
        return vals @ self.lamC

    def ring(self, k: int) -> np.ndarray:
        """lambda_{chi_k}(n) in Z[x]/(x^m - 1), shape (N + 1, m)."""
        m = self.group.exponent
        exps = self.group.characters[k].exponents
        out = np.zeros((self.N + 1, m), dtype=np.int64)
        for i, e in enumerate(exps):
            out[:, e] += self.lamC[i]
        return out

    @cached_property
    def rings(self) -> np.ndarray:
        return np.stack([self.ring(k) for k in range(self.group.h)])


def build_coefficients(G: ClassGroup, N: int) -> CoefficientTable:
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_TABLE:
        raise OverflowError(f"N={N} exceeds the coefficient table capacity {MAX_TABLE}")
    lamC = np.stack([representation_counts(f, N) // 2 for f in G.elements])
    lamC[:, 0] = 0
    lamC.setflags(write=False)
    kron = kronecker_table(G.D, N)
    kron.setflags(write=False)
    return CoefficientTable(G, N, lamC, kron)


def divisor_character_sum(D: int, N: int) -> np.ndarray:
    """sum_{d | n} chi_D(d) for n <= N, by a divisor sieve (independent of the forms)."""
    kron = kronecker_table(D, N).astype(np.int64)
    out = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        if kron[d]:
            out[d::d] += kron[d]
    return out


# ---------------------------------------------------------------- identities


def verify_hecke(T: CoefficientTable, bound: int, include_trivial: bool = False) -> list[tuple[int, int, int]]:
    """Check the Hecke relations exactly for d, m <= bound.

    Returns the violating triples (character index, d, m); empty on success.
    """
    if bound * bound > T.N:
        raise ValueError(f"bound^2 = {bound * bound} exceeds table range N = {T.N}")
    G = T.group
    m = G.exponent
    R = cyc.reduction_matrix(m)
    Tm = cyc.mult_tensor(m)
    mu = mobius_table(bound)
    violations = []
    ks = range(G.h) if include_trivial else range(1, G.h)
    for k in ks:
        lam = T.ring(k) @ R  # canonical coordinates, shape (N + 1, phi(m))
        idx = np.arange(1, bound + 1)
        lhs = lam[np.outer(idx, idx)]
        rhs = np.zeros_like(lhs)
        for q in range(1, bound + 1):
            coef = int(mu[q]) * int(T.kron[q])
            if coef == 0:
                continue
            sub = lam[1 : bound // q + 1]
            prod_ = np.einsum("ai,bj,ijk->abk", sub, sub, Tm)
            sel = idx[: bound // q] * q - 1
            rhs[np.ix_(sel, sel)] += coef * prod_
        bad = np.argwhere(np.any(lhs != rhs, axis=-1))
        violations.extend((k, int(d) + 1, int(e) + 1) for d, e in bad)
    return violations


def orthogonality_check(T: CoefficientTable) -> dict[str, int]:
    """Both directions of the character/class expansion, in exact arithmetic.

    Forward: lambda_chi = sum_C chi(C) lambda_C holds by construction of the
    group-ring table, so it is checked against an independent per-ideal-class
    accumulation. Inverse: h * lambda_C(n) = sum_chi conj(chi(C)) lambda_chi(n).
    Returns mismatch counts.
    """
    G = T.group
    m = G.exponent
    R = cyc.reduction_matrix(m)
    forward = 0
    inverse = 0
    rings = T.rings
    for k, chi in enumerate(G.characters):
        acc = np.zeros((T.N + 1, m), dtype=np.int64)
        for i in range(G.h):
            unit = np.zeros(m, dtype=np.int64)
            unit[chi.exponents[i]] = 1
            acc += np.outer(T.lamC[i], unit)
        forward += int(np.count_nonzero(np.any(acc @ R != rings[k] @ R, axis=-1)))
    for i in range(G.h):
        total = np.zeros((T.N + 1, m), dtype=np.int64)
        for k, chi in enumerate(G.characters):
            unit = np.zeros(m, dtype=np.int64)
            unit[(-chi.exponents[i]) % m] = 1
            total += cyc.ring_mul(rings[k], unit, m)
        expect = cyc.ring_from_int(G.h * T.lamC[i], m)
        inverse += int(np.count_nonzero(np.any(total @ R != expect @ R, axis=-1)))
    return {"forward": forward, "inverse": inverse}


def character_completeness(G: ClassGroup) -> float:
    """max |sum_chi chi(C) conj(chi(C')) - h [C = C']| over class pairs."""
    V = np.array([chi.values for chi in G.characters])
    M = V.T @ V.conj()
    return float(np.max(np.abs(M - G.h * np.eye(G.h))))


def is_homomorphism(chi: ClassCharacter) -> bool:
    t = chi.group.table
    e = chi.exponents
    return bool(np.all((e[:, None] + e[None, :]) % chi.m == e[t]))


def class_number_crosscheck(G: ClassGroup, terms: int) -> dict[str, float]:
    """Confirm h through L(1, chi_D) computed from the character series.

    The partial sum over n <= terms has tail bounded by 2 * max_t |S(t)| / terms,
    S(t) the character partial sum (Abel summation); max |S| is taken over one
    full period, which bounds it everywhere. The cruder D / terms bound is
    reported as well.
    """
    if terms < 1000:
        raise ValueError("terms must be at least 1000")
    D = G.D
    period = kronecker_table(D, D - 1).astype(np.float64)
    smax = float(np.max(np.abs(np.cumsum(period))))
    total = 0.0
    chunk = 1 << 20
    start = 1
    while start <= terms:
        stop = min(start + chunk, terms + 1)
        n = np.arange(start, stop, dtype=np.int64)
        total += float(np.sum(period[n % D] / n))
        start = stop
    tail = 2.0 * smax / terms
    crude = D / terms
    if tail > 0.4:
        warnings.warn(f"tail bound {tail:.3g} exceeds 0.4; increase terms", RuntimeWarning)
    estimate = math.sqrt(D) * total / math.pi
    return {
        "D": D,
        "h": G.h,
        "L1": total,
        "h_estimate": estimate,
        "residual": abs(G.h - estimate),
        "tail_bound": tail,
        "residual_bound": math.sqrt(D) * tail / math.pi,
        "crude_tail_bound": crude,
    }


def L1_exact(G: ClassGroup) -> float:
    """L(1, chi_D) = pi h / sqrt(D) (class number formula, w = 2)."""
    return math.pi * G.h / math.sqrt(G.D)


def prime_ideal_class(G: ClassGroup, p: int) -> tuple[int, int]:
    """Classes of the two prime ideals above a split prime p (p and its conjugate)."""
    from .primes import sqrt_mod_prime

    D = G.D
    if p == 2:
        if D % 8 != 7:
            raise ValueError(f"2 does not split for D={D}")
        b = 1
    else:
        if kronecker_chi(D, p) != 1:
            raise ValueError(f"{p} does not split for D={D}")
        b = sqrt_mod_prime(-D % p, p)
        if b % 2 == 0:
            b = p - b
    f = (p, b, (b * b + D) // (4 * p))
    i = G.class_of(f)
    return i, G.inverse_index(i)


def find_representation(form: ReducedForm, n: int) -> tuple[int, int] | None:
    """Some (x, y) with form(x, y) = n, by search over y."""
    a, b = form.a, form.b
    D = -form.disc
    ymax = math.isqrt(4 * a * n // D) + 1
    for y in range(0, ymax + 1):
        for yy in ((y, -y) if y else (0,)):
            disc = 4 * a * n - D * yy * yy
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for num in (-b * yy + r, -b * yy - r):
                if num % (2 * a) == 0:
                    x = num // (2 * a)
                    if form(x, yy) == n:
                        return x, yy
    return None


def ideal_counts_from_primes(G: ClassGroup, N: int) -> np.ndarray:
    """lambda_C(n) through prime-ideal factorization (test oracle).

    Builds every ideal of norm <= N as a product of prime ideals and tracks
    its class with the composition table. Independent of representation counts.
    """
    from .primes import prime_sieve

    D = G.D
    h = G.h
    # list of (norm, class) for prime ideals
    prime_ideals: list[list[tuple[int, int]]] = []
    for p in prime_sieve(N):
        p = int(p)
        chi = kronecker_chi(D, p)
        if chi == 1:
            i, j = prime_ideal_class(G, p)
            prime_ideals.append([(p, i), (p, j)])
        elif chi == 0:
            prime_ideals.append([(p, G.class_of((D, D, (D * D + D) // (4 * D))))])
        elif p * p <= N:
            prime_ideals.append([(p * p, 0)])
    counts = np.zeros((N + 1, h), dtype=np.int64)
    counts[1, 0] = 1
    for ideals in prime_ideals:
        for norm, cls in ideals:
            # ideals times P^k for k >= 1, shifting the class by cls each step
            inv = _inverse_perm(G.table[:, cls])
            new = counts.copy()
            cur = counts
            while True:
                top = N // norm
                if top < 1:
                    break
                step = np.zeros_like(counts)
                step[np.arange(1, top + 1) * norm] = cur[1 : top + 1][:, inv]
                if not step.any():
                    break
                new += step
                cur = step
            counts = new
    return counts.T


def _inverse_perm(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv
