import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from linniksieve.primes import (
    divisors,
    factorize,
    is_prime,
    is_squarefree,
    least_prime_factor,
    mobius,
    mobius_table,
    prime_sieve,
    primes_in_range,
    segmented_primes,
    sqrt_mod_prime,
)


def test_prime_sieve_matches_sympy():
    assert prime_sieve(10_000).tolist() == list(sympy.primerange(2, 10_001))
    assert prime_sieve(1).size == 0
    assert prime_sieve(2).tolist() == [2]


def test_segments_join_to_full_range():
    chunks = list(segmented_primes(1000, 50_000, segment=997))
    joined = np.concatenate(chunks)
    assert joined.tolist() == list(sympy.primerange(1000, 50_000))
    assert all(c.size for c in chunks)
    assert primes_in_range(90, 97).size == 0
    assert primes_in_range(90, 98).tolist() == [97]


def test_least_prime_factor_table():
    lpf = least_prime_factor(2000)
    for n in range(2, 2001):
        assert lpf[n] == min(sympy.primefactors(n))
    # 1 has no prime factor and passes every "lpf >= z" filter
    assert lpf[1] > 2000


def test_mobius_table_matches_pointwise():
    mu = mobius_table(3000)
    assert [int(mu[n]) for n in range(1, 3001)] == [mobius(n) for n in range(1, 3001)]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


@given(st.integers(min_value=1, max_value=10**9))
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert is_prime(p)
        prod *= p**e
    assert prod == n
    assert is_squarefree(n) == all(e == 1 for e in f.values())


@given(st.integers(min_value=1, max_value=5000))
def test_divisors(n):
    assert divisors(n) == sorted(sympy.divisors(n))


@settings(max_examples=300)
@given(st.integers(min_value=0, max_value=10**12))
def test_is_prime_against_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprimes to several small bases
    for n in (2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383):
        assert not is_prime(n)


@pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 23, 101, 1009, 10007])
def test_sqrt_mod_prime(p):
    for a in range(p):
        if pow(a, (p - 1) // 2, p) == 1 or a == 0:
            r = sqrt_mod_prime(a, p)
            assert r * r % p == a
