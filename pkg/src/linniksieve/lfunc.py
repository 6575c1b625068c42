"""Completed L-functions, critical-line zeros and the explicit formula.

Three families are supported, all self-dual with root number 1:

* degree 1, conductor 1: the Riemann zeta function;
* degree 1, conductor D: L(s, chi_D), an odd real character;
* degree 2, conductor D: L_K(s, chi) for a class-group character chi, with
  gamma factor (2 pi)^(-s) Gamma(s); chi = chi_0 gives zeta_K = zeta L(s, chi_D).

Evaluation uses the incomplete-gamma form of the approximate functional
equation. With the theta-function split at A,

    Lambda(s) = I_A(s) + I_{1/A}(1 - s) - r A^(e(s-1)) / (1 - s) - r A^(e s) / s,

where I_A(s) = sum_n lambda(n) Y_n^(-s/2) Gamma((s+a)/2, A Y_n) with
Y_n = pi n^2 / q in degree 1 (e = 1/2), and
I_A(s) = sum_n lambda(n) y_n^(-s) Gamma(s, A y_n) with y_n = 2 pi n / sqrt(q)
in degree 2 (e = 1). The residue constant r is 1 for zeta, h/2 for zeta_K
and 0 otherwise. The result does not depend on A, which makes comparing two
values of A a non-trivial accuracy check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import optimize, special

from . import cyclotomic as cyc
from .cache import cache_dir, content_key
from .classgroup import build_coefficients, enumerate_class_group, kronecker_table
from .primes import prime_sieve
from .window import SmoothWindow

FORMAT_VERSION = 1


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class LFunctionSpec:
    """A self-dual L-function with root number 1.

    ``coefficients(n_max)`` returns lambda(n) for 0 <= n <= n_max as float64.
    """

    name: str
    degree: int
    conductor: int
    gamma_shift: int
    residue: float
    coefficient_source: tuple = field(repr=False)
    root_number: int = 1

    def coefficients(self, n_max: int) -> np.ndarray:
        return _coefficients(self.coefficient_source, _round_up(n_max))[: n_max + 1]

    @property
    def has_pole(self) -> bool:
        return self.residue != 0


def _round_up(n: int) -> int:
    return 1 << max(6, (n - 1).bit_length())


@lru_cache(maxsize=32)
def _coefficients(source: tuple, n_max: int) -> np.ndarray:
    kind = source[0]
    if kind == "zeta":
        out = np.ones(n_max + 1)
    elif kind == "dirichlet":
        out = kronecker_table(source[1], n_max).astype(np.float64)
    elif kind == "class":
        ring, m, zero = _class_ring(source[1], source[2], n_max)
        out = cyc.to_complex(ring, m).real
        out[zero] = 0.0
    else:
        raise ValueError(f"unknown coefficient source {kind!r}")
    out[0] = 0.0
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _class_ring(D: int, k: int, n_max: int) -> tuple[np.ndarray, int, np.ndarray]:
    """lambda_chi in the group ring, its modulus m and the mask of exact zeros."""
    T = build_coefficients(enumerate_class_group(D), n_max)
    ring = T.ring(k)
    m = T.group.exponent
    zero = ~np.any(cyc.reduce(ring, m), axis=-1)
    return ring, m, zero


def _mp_coefficients(spec: "LFunctionSpec", n_max: int) -> list:
    """lambda(n) at the current mpmath precision; exact zeros stay 0."""
    src = spec.coefficient_source
    if src[0] != "class":
        return [int(v) for v in spec.coefficients(n_max)]
    ring, m, zero = _class_ring(src[1], src[2], _round_up(n_max))
    cosines = [mp.cos(2 * mp.pi * j / m) for j in range(m)]
    out: list = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        if not zero[n]:
            out[n] = mp.fsum(int(c) * cosines[j] for j, c in enumerate(ring[n]) if c)
    return out


def zeta_spec() -> LFunctionSpec:
    return LFunctionSpec("zeta", 1, 1, 0, 1.0, ("zeta",))


def dirichlet_spec(D: int) -> LFunctionSpec:
    """L(s, chi_D); chi_D is odd, so the gamma shift is 1."""
    enumerate_class_group(D)  # validates D
    return LFunctionSpec(f"chi_{D}", 1, D, 1, 0.0, ("dirichlet", D))


def class_spec(D: int, k: int) -> LFunctionSpec:
    """L_K(s, chi_k); k = 0 is the Dedekind zeta function of Q(sqrt(-D))."""
    G = enumerate_class_group(D)
    if not 0 <= k < G.h:
        raise ValueError(f"character index {k} out of range for h={G.h}")
    r = G.h / 2.0 if k == 0 else 0.0
    return LFunctionSpec(f"K{D}_chi{k}", 2, D, 0, r, ("class", D, k))


# ---------------------------------------------------------------- evaluation


class TruncationBudgetError(RuntimeError):
    """The evaluation point needs more coefficients than allowed."""


MAX_TERMS = 200_000


def _dps(spec: LFunctionSpec, t: float) -> int:
    return 20 + int(math.ceil(math.pi * spec.degree * abs(t) / (4 * math.log(10)))) + 5


def _scale(spec: LFunctionSpec, n: np.ndarray | int):
    if spec.degree == 1:
        return mp.pi * mp.mpf(n) ** 2 / spec.conductor
    return 2 * mp.pi * mp.mpf(n) / mp.sqrt(spec.conductor)


def _n_max(spec: LFunctionSpec, t: float, A: float, digits: float = 25.0) -> int:
    """Smallest n with min(A, 1/A) * Y_n past the decay needed for ``digits`` digits."""
    cut = digits * math.log(10) + math.pi * spec.degree * abs(t) / 4 + 10
    m = min(A, 1.0 / A)
    if spec.degree == 1:
        n = math.sqrt(cut * spec.conductor / (math.pi * m))
    else:
        n = cut * math.sqrt(spec.conductor) / (2 * math.pi * m)
    n = int(math.ceil(n)) + 1
    if n > MAX_TERMS:
        raise TruncationBudgetError(f"{spec.name} at t={t} needs {n} terms (budget {MAX_TERMS})")
    return n


def _I(spec: LFunctionSpec, s, A, lam: np.ndarray, n_lo: int, n_hi: int):
    total = mp.mpc(0)
    for n in range(n_lo, n_hi + 1):
        c = lam[n]
        if not c:
            continue
        Y = _scale(spec, n)
        if spec.degree == 1:
            total += c * Y ** (-s / 2) * mp.gammainc((s + spec.gamma_shift) / 2, A * Y)
        else:
            total += c * Y ** (-s) * mp.gammainc(s, A * Y)
    return total


def _polar(spec: LFunctionSpec, s, A):
    if not spec.has_pole:
        return mp.mpc(0)
    e = mp.mpf(1) / 2 if spec.degree == 1 else mp.mpf(1)
    r = spec.residue
    return -r * A ** (e * (s - 1)) / (1 - s) - r * A ** (e * s) / s


def gamma_factor(spec: LFunctionSpec, s):
    """q^(s/2) gamma(s), so that Lambda = gamma_factor * L."""
    if spec.degree == 1:
        return (spec.conductor / mp.pi) ** (s / 2) * mp.gamma((s + spec.gamma_shift) / 2)
    return (mp.sqrt(spec.conductor) / (2 * mp.pi)) ** s * mp.gamma(s)


@dataclass(frozen=True)
class Evaluation:
    s: complex
    completed: complex
    value: complex
    error_estimate: float
    terms: int


def completed(spec: LFunctionSpec, s: complex, A: float = 1.0) -> Evaluation:
    """Lambda(s) and L(s) with an estimate of the truncation error in L(s)."""
    s = complex(s)
    with mp.workdps(_dps(spec, s.imag)):
        ms = mp.mpc(s.real, s.imag)
        A_ = mp.mpf(A)
        n = _n_max(spec, s.imag, A)
        lam = _mp_coefficients(spec, n + 3)
        main = _I(spec, ms, A_, lam, 1, n) + spec.root_number * _I(spec, 1 - ms, 1 / A_, lam, 1, n)
        tail = abs(_I(spec, ms, A_, lam, n + 1, n + 3)) + abs(_I(spec, 1 - ms, 1 / A_, lam, n + 1, n + 3))
        Lam = main + _polar(spec, ms, A_)
        gf = gamma_factor(spec, ms)
        val = Lam / gf
        err = float(tail / abs(gf))
        return Evaluation(s, complex(Lam), complex(val), err, n)


def evaluate(spec: LFunctionSpec, s: complex, A: float = 1.0) -> complex:
    """L(s)."""
    return completed(spec, s, A).value


def hurwitz_dirichlet(D: int, s: complex) -> complex:
    """L(s, chi_D) = D^(-s) sum_a chi_D(a) zeta(s, a/D), an independent route."""
    chi = kronecker_table(D, D - 1)
    with mp.workdps(30):
        ms = mp.mpc(s.real, s.imag)
        total = mp.fsum(int(chi[a]) * mp.zeta(ms, mp.mpf(a) / D) for a in range(1, D) if chi[a])
        return complex(total * mp.power(D, -ms))


# ---------------------------------------------------------------- critical line


def theta(spec: LFunctionSpec, t: float) -> float:
    """Continuous phase of q^(s/2) gamma(s) on s = 1/2 + i t, with theta(0) = 0."""
    with mp.workdps(20):
        s = mp.mpc(0.5, t)
        if spec.degree == 1:
            ph = t / 2 * mp.log(spec.conductor / mp.pi) + mp.im(mp.loggamma((s + spec.gamma_shift) / 2))
        else:
            ph = t * mp.log(mp.sqrt(spec.conductor) / (2 * mp.pi)) + mp.im(mp.loggamma(s))
        return float(ph)


def hardy_z(spec: LFunctionSpec, t: float) -> float:
    """Lambda(1/2 + i t) / |q^(s/2) gamma(s)|, real for self-dual root-number-1 L-functions."""
    with mp.workdps(_dps(spec, t)):
        s = mp.mpc(0.5, t)
        n = _n_max(spec, t, 1.0)
        lam = _mp_coefficients(spec, n)
        Lam = 2 * mp.re(_I(spec, s, mp.mpf(1), lam, 1, n)) + mp.re(_polar(spec, s, mp.mpf(1)))
        return float(Lam / abs(gamma_factor(spec, s)))


def count_main_term(spec: LFunctionSpec, T: float) -> float:
    """theta(T)/pi, plus 1 when Lambda has poles (the s(1-s) factor)."""
    return theta(spec, T) / math.pi + (1.0 if spec.has_pole else 0.0)


def count_slack(spec: LFunctionSpec, t: float) -> float:
    """Generous bound for |N(t) - main term(t)| used in tail estimates.

    Published bounds for S(t) have the shape a log(q t) + b log log(q t) + c
    with a below 0.25 and c below 3 per degree; this takes a = 0.5, c = 3.
    """
    ell = math.log(max(spec.conductor, 1) * (t + 2) / (2 * math.pi) + math.e)
    return spec.degree * (0.5 * ell + 2 * math.log(1 + ell) + 3.0)


@dataclass(frozen=True)
class ZeroList:
    """Critical-line ordinates 0 < gamma <= T of one L-function."""

    spec_name: str
    degree: int
    conductor: int
    T: float
    step: float
    ordinates: tuple[float, ...]
    main_term: float
    refined_to: float = 1e-10

    @property
    def count(self) -> int:
        return len(self.ordinates)

    @property
    def count_discrepancy(self) -> float:
        return self.count - self.main_term

    @property
    def audit_ok(self) -> bool:
        return abs(self.count_discrepancy) <= 1.0

    def up_to(self, T: float) -> "ZeroList":
        if T > self.T:
            raise ValueError(f"list only scanned to {self.T}")
        kept = tuple(g for g in self.ordinates if g <= T)
        return ZeroList(self.spec_name, self.degree, self.conductor, T, self.step, kept, _main_from_cache(self, T), self.refined_to)


def _main_from_cache(zl: ZeroList, T: float) -> float:
    spec = spec_from_name(zl.spec_name)
    return count_main_term(spec, T)


def spec_from_name(name: str) -> LFunctionSpec:
    if name == "zeta":
        return zeta_spec()
    if name.startswith("chi_"):
        return dirichlet_spec(int(name[4:]))
    if name.startswith("K"):
        D, k = name[1:].split("_chi")
        return class_spec(int(D), int(k))
    raise ValueError(f"unknown L-function name {name!r}")


class ZeroCountError(AssertionError):
    """Scanned zeros disagree with the counting formula beyond +-1."""


def scan_zeros(spec: LFunctionSpec, T: float, step: float = 0.05, xtol: float = 1e-10, strict: bool = True) -> ZeroList:
    """Bracket sign changes of hardy_z on a grid of ``step`` and refine each with Brent's method."""
    if T <= 0:
        raise ValueError("T must be positive")
    if step > 0.05:
        raise ValueError("step must be at most 0.05")
    K = int(math.ceil(T / step))
    grid = np.linspace(0.0, K * step, K + 1)
    grid = grid[grid <= T + 1e-12]
    if grid[-1] < T:
        grid = np.append(grid, T)
    vals = [hardy_z(spec, float(t)) for t in grid]
    zeros = []
    for k in range(1, len(grid)):
        a, b = vals[k - 1], vals[k]
        if b == 0.0 and grid[k] > 0:
            zeros.append(float(grid[k]))
        elif a * b < 0:
            zeros.append(float(optimize.brentq(lambda t: hardy_z(spec, t), grid[k - 1], grid[k], xtol=xtol)))
    zl = ZeroList(spec.name, spec.degree, spec.conductor, float(T), step, tuple(zeros), count_main_term(spec, T), xtol)
    if strict and not zl.audit_ok:
        raise ZeroCountError(f"{spec.name}: {zl.count} zeros found up to {T}, counting formula gives {zl.main_term:.3f}")
    return zl


def real_zeros(spec: LFunctionSpec, step: float = 0.01) -> list[float]:
    """Real zeros in (1/2, 1) located by sign changes of Lambda on a grid.

    When Lambda has a pole at 1 the scan uses (1 - s) Lambda(s) and stops a
    hair short of 1.
    """
    top = 1.0 - 1e-9 if spec.has_pole else 1.0
    grid = np.append(np.arange(0.5, top, step), top)

    def f(sig):
        val = completed(spec, complex(sig, 0.0)).completed.real
        return (1 - sig) * val if spec.has_pole else val

    vals = [f(float(g)) for g in grid]
    out = []
    for k in range(1, len(vals)):
        if vals[k - 1] * vals[k] < 0:
            out.append(float(optimize.brentq(f, grid[k - 1], grid[k], xtol=1e-12)))
        elif vals[k] == 0.0 and k < len(vals) - 1:
            out.append(float(grid[k]))
    return out


# ---------------------------------------------------------------- cache


def _cache_key(spec: LFunctionSpec, T: float, step: float) -> str:
    return content_key({"kind": "zeros", "spec": spec.name, "T": T, "step": step, "format": FORMAT_VERSION})


def _chi_label(spec: LFunctionSpec):
    src = spec.coefficient_source
    return src[2] if src[0] == "class" else ("zeta" if src[0] == "zeta" else "chi_D")


def zero_rows(spec: LFunctionSpec, zl: ZeroList) -> list[dict]:
    return [{"disc": spec.conductor, "chi": _chi_label(spec), "ordinate": round(g, 10), "refined_to": zl.refined_to} for g in zl.ordinates]


def cached_zeros(spec: LFunctionSpec, T: float, step: float = 0.05, directory=None) -> ZeroList:
    """Zero list from an append-only JSONL cache, scanning and stamping on a miss.

    A file is used only if its last line is an audit stamp that matches the
    request; unstamped or mismatched files are ignored and a fresh scan is
    appended under a new name.
    """
    from . import __version__

    d = cache_dir(directory)
    path = d / f"zeros-{spec.name}-{_cache_key(spec, T, step)}.jsonl"
    if path.exists():
        lines = path.read_text().splitlines()
        if lines:
            stamp = json.loads(lines[-1])
            if stamp.get("audit", {}).get("version") == __version__ and stamp["audit"].get("spec") == spec.name:
                ords = tuple(json.loads(l)["ordinate"] for l in lines[:-1])
                a = stamp["audit"]
                return ZeroList(spec.name, spec.degree, spec.conductor, a["T"], a["step"], ords, a["main_term"], a["refined_to"])
    zl = scan_zeros(spec, T, step)
    d.mkdir(parents=True, exist_ok=True)
    with path.open("a") as fh:
        for row in zero_rows(spec, zl):
            fh.write(json.dumps(row, sort_keys=True) + "\n")
        stamp = {
            "spec": spec.name,
            "T": T,
            "step": step,
            "count": zl.count,
            "main_term": zl.main_term,
            "audit_ok": zl.audit_ok,
            "refined_to": zl.refined_to,
            "version": __version__,
        }
        fh.write(json.dumps({"audit": stamp}, sort_keys=True) + "\n")
    return zl


# ---------------------------------------------------------------- Hypothesis H(c) audit


@dataclass(frozen=True)
class AuditEntry:
    name: str
    conductor: int
    threshold: float
    beta_max: float
    margin: float
    count_ok: bool
    passed: bool
    nearest: float | None


@dataclass(frozen=True)
class HypothesisAudit:
    D: int
    c: float
    T: float
    entries: tuple[AuditEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def audit_zero_set(name: str, conductor: int, c: float, zeros: list[tuple[float, float]], T: float, count_ok: bool = True) -> AuditEntry:
    """Check beta <= 1 - c / log(conductor) for every zero (beta, gamma) with |gamma| <= T.

    Zeros found by the scanners lie on the critical line or on the real
    segment, so beta_max defaults to 1/2.
    """
    bound = 1.0 - c / math.log(conductor)
    relevant = [(b, g) for b, g in zeros if abs(g) <= T]
    beta_max = max([0.5] + [b for b, _ in relevant])
    nearest = min((abs(g) for _, g in relevant), default=None)
    margin = bound - beta_max
    return AuditEntry(name, conductor, bound, beta_max, margin, count_ok, count_ok and margin >= 0, nearest)


def audit_hypothesis(D: int, c: float = 0.0875, T: float = 1.0, include_class: bool = True, step: float = 0.05) -> HypothesisAudit:
    G = enumerate_class_group(D)
    specs = [dirichlet_spec(D)]
    if include_class:
        specs += [class_spec(D, k) for k in range(1, G.h)]
    entries = []
    for spec in specs:
        zl = scan_zeros(spec, T, step, strict=False)
        zs = [(0.5, g) for g in zl.ordinates] + [(b, 0.0) for b in real_zeros(spec)]
        entries.append(audit_zero_set(spec.name, spec.conductor, c, zs, T, zl.audit_ok))
    return HypothesisAudit(D, c, T, tuple(entries))


# ---------------------------------------------------------------- explicit formula


def power_sums(lam_p: float, chi_p: int, k_max: int) -> list[float]:
    """s_k = alpha_1^k + alpha_2^k for the local roots at p, k = 1..k_max."""
    s_prev2, s_prev1 = 2.0, lam_p
    out = [lam_p]
    for _ in range(2, k_max + 1):
        s_next = lam_p * s_prev1 - chi_p * s_prev2
        out.append(s_next)
        s_prev2, s_prev1 = s_prev1, s_next
    return out


def prime_side(D: int, k: int, x: float, window: SmoothWindow) -> dict[str, float]:
    """sum_{p^j} s_j(p) phi(j log p / log x) / (j p^j), split into j = 1 and j >= 2."""
    L = math.log(x)
    top = int(math.floor(x**window.u1))
    lam = class_spec(D, k).coefficients(top)
    chi = kronecker_table(D, top)
    primes = prime_sieve(top)
    u = np.log(primes) / L
    w1 = float(np.sum(lam[primes] * window(u) / primes))
    higher = 0.0
    for p in primes[primes * primes <= top].tolist():
        jmax = int(math.floor(window.u1 * L / math.log(p)))
        sk = power_sums(float(lam[p]), int(chi[p]) if p != D else 0, jmax)
        for j in range(2, jmax + 1):
            higher += sk[j - 1] * float(window(j * math.log(p) / L)) / (j * p**j)
    return {"primes": w1, "prime_powers": higher, "total": w1 + higher}


def _archimedean(D: int, x: float, window: SmoothWindow) -> float:
    """(1/2pi) int Phi~(1/2 + it) (log D - 2 log 2pi + 2 Re psi(1/2 + it)) dt.

    Unit-width Gauss-Legendre panels, stopped once |Phi~| has fallen 12
    orders below its value at t = 0 on two consecutive panels.
    """
    nodes, weights = np.polynomial.legendre.leggauss(60)
    ref = abs(window.log_mellin(0.5, x)[0])
    total = 0.0
    quiet = 0
    lo = 0.0
    while quiet < 2 and lo < 5000.0:
        t = 0.5 * (nodes + 1) + lo
        s = 0.5 + 1j * t
        phi = window.log_mellin(s, x)
        kern = math.log(D) - 2 * math.log(2 * math.pi) + 2 * special.digamma(s).real
        total += float(np.sum(0.5 * weights * (phi.real * kern)))
        quiet = quiet + 1 if np.max(np.abs(phi)) < 1e-12 * ref else 0
        lo += 1.0
    return total / math.pi


def tail_estimate(specs_zeros: list[tuple[LFunctionSpec, ZeroList]], x: float, window: SmoothWindow) -> float:
    """Bound on sum_{|gamma| > T} |Phi~(rho)| over zeros beyond the scanned height.

    Uses |Phi~(1/2 + i gamma)| <= c3 / (|gamma| log x)^3 and
    sum_{gamma > T} gamma^(-3) <= 3 int_T^inf (N+(t) - N(T)) t^(-4) dt with
    N+ = counting main term + count_slack.
    """
    L = math.log(x)
    c3 = window.third_derivative_weight(x)
    total = 0.0
    for spec, zl in specs_zeros:
        T = zl.T
        if T <= 0:
            raise ValueError("tail estimate needs T > 0")

        def integrand(t):
            return (count_main_term(spec, t) + count_slack(spec, t) - zl.count) * t**-4

        from scipy.integrate import quad

        val, _ = quad(integrand, T, np.inf, limit=200)
        total += 2 * 3 * val  # zeros come in conjugate pairs
    return c3 / L**3 * total


@dataclass(frozen=True)
class ExplicitFormulaReport:
    D: int
    chi: int
    x: float
    T: float
    lhs: float
    lhs_primes: float
    lhs_prime_powers: float
    main: float
    zero_sum: float
    archimedean: float
    rhs: float
    residual: float
    tail_estimate: float
    zeros_used: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def explicit_formula_check(
    D: int,
    chi: int,
    x: float,
    window: SmoothWindow,
    T: float,
    zero_lists: list[tuple[LFunctionSpec, ZeroList]] | None = None,
) -> ExplicitFormulaReport:
    """Both sides of the explicit formula for L_K(s, chi) with test function phi(log n / log x).

    The prime side includes prime powers exactly. The zero side is
    delta(chi) (Phi~(1) + Phi~(0)) - sum_{|gamma| <= T} Phi~(rho) plus the
    archimedean integral; for chi_0 the zeros are those of zeta and L(s, chi_D).
    """
    lo, hi = window.support
    theta_ = math.log(D) / math.log(x)
    if not (0 < lo < hi <= 1):
        raise ValueError("window support must lie in (0, 1]")
    if not theta_ < 2 * lo - hi:
        raise ValueError(f"log D / log x = {theta_:.4f} must be below 2 a1 - a2 = {2 * lo - hi:.4f}")
    if zero_lists is None:
        specs = [zeta_spec(), dirichlet_spec(D)] if chi == 0 else [class_spec(D, chi)]
        zero_lists = [(sp, scan_zeros(sp, T)) if T > 0 else (sp, ZeroList(sp.name, sp.degree, sp.conductor, 0.0, 0.05, (), 0.0)) for sp in specs]
    else:
        zero_lists = [(sp, zl.up_to(T)) if T > 0 else (sp, ZeroList(sp.name, sp.degree, sp.conductor, 0.0, 0.05, (), 0.0)) for sp, zl in zero_lists]
    ps = prime_side(D, chi, x, window)
    main = 0.0
    if chi == 0:
        main = float(window.log_mellin(1.0, x)[0].real + window.log_mellin(0.0, x)[0].real)
    ords = np.array([g for _, zl in zero_lists for g in zl.ordinates], dtype=np.float64)
    zsum = float(2 * np.sum(window.log_mellin(0.5 + 1j * ords, x).real)) if ords.size else 0.0
    arch = _archimedean(D, x, window)
    rhs = main - zsum + arch
    tail = tail_estimate(zero_lists, x, window) if T > 0 else float("inf")
    return ExplicitFormulaReport(
        D, chi, float(x), float(T), ps["total"], ps["primes"], ps["prime_powers"], main, zsum, arch, rhs, abs(ps["total"] - rhs), tail, int(ords.size)
    )


# ---------------------------------------------------------------- zero-density surrogate


def zero_surrogate_sum(zl: ZeroList, x: float) -> dict[str, float]:
    """sum over zeros rho = 1/2 +- i gamma of (1 + (1-beta) log x)^-1 (1 + (gamma log x)^2)^-1.

    Also returns the bound d + theta/2 + 1 and a tail bound for |gamma| > T.
    """
    spec = spec_from_name(zl.spec_name)
    L = math.log(x)
    g = np.asarray(zl.ordinates, dtype=np.float64)
    a = 1.0 / (1.0 + 0.5 * L)
    value = float(2 * np.sum(a / (1.0 + (g * L) ** 2)))
    theta_ = math.log(max(zl.conductor, 1)) / L
    bound = zl.degree + theta_ / 2 + 1.0
    tail = float("inf")
    if zl.T > 0:
        from scipy.integrate import quad

        val, _ = quad(lambda t: (count_main_term(spec, t) + count_slack(spec, t) - zl.count) * t**-3, zl.T, np.inf, limit=200)
        tail = 2 * a / L**2 * 2 * val
    return {"value": value, "bound": bound, "tail": tail, "zeros": 2 * zl.count}
