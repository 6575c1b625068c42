"""Prime sieves and small arithmetic tables.

Everything here is plain Eratosthenes on numpy boolean arrays. The segmented
iterator keeps memory bounded for long prime runs (products over p < z,
least-prime searches up to 10^7).
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

SEGMENT = 1 << 24


def prime_sieve(n: int) -> np.ndarray:
    """Return all primes p <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def segmented_primes(lo: int, hi: int, segment: int = SEGMENT) -> Iterator[np.ndarray]:
    """Yield primes in [lo, hi) one segment at a time, in increasing order.

    Segments are `segment` integers wide; the yielded arrays are never empty
    unless the whole range is.
    """
    lo = max(lo, 2)
    if hi <= lo:
        return
    base = prime_sieve(math.isqrt(hi - 1) + 1)
    start = lo
    while start < hi:
        stop = min(start + segment, hi)
        mask = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            if first < stop:
                mask[first - start :: p] = False
        found = np.flatnonzero(mask).astype(np.int64) + start
        if found.size:
            yield found
        start = stop


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """All primes in [lo, hi), concatenated from the segmented sieve."""
    chunks = list(segmented_primes(lo, hi))
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def least_prime_factor(n: int) -> np.ndarray:
    """lpf[k] for 0 <= k <= n, with lpf[0] = 0 and lpf[1] = a sentinel larger than n.

    The sentinel makes "no prime factor below w" a single comparison
    ``lpf[k] >= w`` that is true for k = 1.
    """
    lpf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        lpf[1] = n + 1
    for p in range(2, n + 1):
        if p * p > n:
            break
        if lpf[p] == 0:
            seg = lpf[p * p :: p]
            seg[seg == 0] = p
    rest = np.flatnonzero(lpf == 0)
    rest = rest[rest >= 2]
    lpf[rest] = rest
    return lpf


def mobius_table(n: int) -> np.ndarray:
    """mu(k) for 0 <= k <= n (mu(0) = 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in prime_sieve(n):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the small moduli used here."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sqrt_mod_prime(a: int, p: int) -> int:
    """Tonelli-Shanks square root of a quadratic residue a modulo an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r
