import json
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from linniksieve import cyclotomic as cyc
from linniksieve.cache import cached_class_group, class_group_path
from linniksieve.classgroup import (
    ClassGroup,
    DiscriminantError,
    ReducedForm,
    build_coefficients,
    character_completeness,
    class_number_crosscheck,
    compose,
    divisor_character_sum,
    enumerate_class_group,
    find_representation,
    ideal_counts_from_primes,
    is_homomorphism,
    kronecker,
    kronecker_chi,
    kronecker_table,
    orthogonality_check,
    prime_ideal_class,
    reduce_form,
    verify_hecke,
)

DISCS = [d for d in range(7, 3000) if sympy.isprime(d) and d % 4 == 3]
SMALL = [7, 23, 31, 47]


def brute_forms(D):
    """All (a, b, c) with |b| <= a <= c, b^2 - 4ac = -D and the boundary sign rule."""
    out = []
    amax = math.isqrt(D // 3) + 1
    for a in range(1, amax + 1):
        for b in range(-a, a + 1):
            if (b * b + D) % (4 * a):
                continue
            c = (b * b + D) // (4 * a)
            if c < a or ((abs(b) == a or a == c) and b < 0):
                continue
            out.append((a, b, c))
    return sorted(out)


def brute_count(form, n):
    """#{(x, y) : form(x, y) = n} by a box search large enough for a positive definite form."""
    a, b, c = form
    D = 4 * a * c - b * b
    R = math.isqrt(4 * c * n // D) + 2
    S = math.isqrt(4 * a * n // D) + 2
    return sum(1 for x in range(-R, R + 1) for y in range(-S, S + 1) if a * x * x + b * x * y + c * y * y == n)


# ---------------------------------------------------------------- discriminants and forms


@pytest.mark.parametrize("D", [-7, 0, 3, 5, 8, 13, 15, 27, 35])
def test_rejects_bad_discriminants(D):
    with pytest.raises(DiscriminantError):
        enumerate_class_group(D)


@pytest.mark.parametrize(
    "D, forms",
    [(7, [(1, 1, 2)]), (23, [(1, 1, 6), (2, -1, 3), (2, 1, 3)])],
)
def test_small_groups_match_enumeration(D, forms):
    G = enumerate_class_group(D)
    assert [tuple(f.as_list()) for f in G.elements] == forms == brute_forms(D)


def test_class_number_47():
    assert enumerate_class_group(47).h == 5 == len(brute_forms(47))


@pytest.mark.parametrize("D", DISCS[::7])
def test_forms_agree_with_brute_force(D):
    G = enumerate_class_group(D)
    assert [tuple(f.as_list()) for f in G.elements] == brute_forms(D)
    assert G.elements[0].a == 1
    assert all(f.is_reduced and f.disc == -D for f in G.elements)


@pytest.mark.parametrize("D", [d for d in DISCS if d < 1500])
def test_group_axioms(D):
    G = enumerate_class_group(D)
    t = G.table
    h = G.h
    assert h % 2 == 1
    assert math.prod(G.structure) == h
    idx = np.arange(h)
    assert np.array_equal(t[0], idx) and np.array_equal(t[:, 0], idx)
    assert np.array_equal(t, t.T)
    for row in t:
        assert sorted(row.tolist()) == idx.tolist()
    if h <= 200:
        # (C_i C_j) C_k = C_i (C_j C_k) for every triple
        assert np.array_equal(t[t], t[:, t])


def test_associativity_against_composition():
    G = enumerate_class_group(3299)
    assert G.structure == (9, 3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        i, j, k = rng.integers(0, G.h, size=3)
        f = compose(compose(G.elements[i], G.elements[j]), G.elements[k])
        g = compose(G.elements[i], compose(G.elements[j], G.elements[k]))
        assert f == g


@given(st.sampled_from(DISCS[:80]), st.data())
@settings(max_examples=60, deadline=None)
def test_inverse_and_reduction(D, data):
    G = enumerate_class_group(D)
    i = data.draw(st.integers(0, G.h - 1))
    f = G.elements[i]
    assert compose(f, f.inverse()) == G.elements[0]
    assert G.table[i, G.inverse_index(i)] == 0
    # an equivalent unreduced form reduces back to f: apply (x, y) -> (x + k y, y)
    k = data.draw(st.integers(-20, 20))
    a, b, c = f.a, f.b, f.c
    assert reduce_form(a, b + 2 * a * k, a * k * k + b * k + c) == f


# ---------------------------------------------------------------- characters


@pytest.mark.parametrize("D", [7, 23, 47, 479, 3299])
def test_characters_complete_and_homomorphic(D):
    G = enumerate_class_group(D)
    chars = G.characters
    assert len(chars) == G.h
    assert len({tuple(c.exponents.tolist()) for c in chars}) == G.h
    assert character_completeness(G) < 1e-12
    for chi in chars:
        assert is_homomorphism(chi)
        assert chi(0) == 1
        assert np.allclose(np.abs(chi.values), 1.0)
    assert chars[0].is_trivial


# ---------------------------------------------------------------- Kronecker symbol


def test_kronecker_examples():
    assert kronecker_chi(7, 7) == 0
    # -23 = 1 mod 8, so (-23 / 2) = 1 by the Kronecker rule at 2
    assert (-23) % 8 == 1 and kronecker_chi(23, 2) == 1
    # Euler's criterion: (-7)^((3-1)/2) mod 3 = 2 = -1
    assert pow(-7 % 3, 1, 3) == 2 and kronecker_chi(7, 3) == -1


@pytest.mark.parametrize("D", [7, 23, 163, 2999])
def test_kronecker_against_sympy(D):
    table = kronecker_table(D, max(5000, 2 * D + 1))
    for n in range(1, 5001):
        expected = sympy.jacobi_symbol(-D % n, n) if n % 2 else int(kronecker(-D, n))
        assert table[n] == expected == kronecker_chi(D, n)
    for m in range(1, 60):
        for n in range(1, 60):
            assert table[m * n] == table[m] * table[n]
    assert table[D] == table[2 * D] == 0
    assert np.array_equal(table[1 : D + 1], table[D + 1 : 2 * D + 1])


# ---------------------------------------------------------------- coefficients


def test_coefficient_examples():
    T23 = build_coefficients(enumerate_class_group(23), 100)
    forms23 = [tuple(f.as_list()) for f in T23.group.elements]
    assert [brute_count(f, 2) // 2 for f in forms23] == [0, 1, 1] == T23.lamC[:, 2].tolist()
    assert T23.lamC[:, 1].tolist() == [1, 0, 0]
    T7 = build_coefficients(enumerate_class_group(7), 100)
    assert brute_count((1, 1, 2), 3) == 0 and T7.lamC[0, 3] == 0


@pytest.mark.parametrize("D", [23, 31, 47, 71])
def test_counts_against_box_search(D):
    T = build_coefficients(enumerate_class_group(D), 300)
    for i, f in enumerate(T.group.elements):
        for n in range(1, 301):
            assert 2 * T.lamC[i, n] == brute_count(tuple(f.as_list()), n)


@pytest.mark.parametrize("D", [7, 23, 31, 47, 3299])
def test_counts_against_prime_ideal_oracle(D):
    G = enumerate_class_group(D)
    T = build_coefficients(G, 20_000)
    assert np.array_equal(ideal_counts_from_primes(G, 20_000), T.lamC)
    assert np.array_equal(T.lam0, divisor_character_sum(D, 20_000))


@pytest.mark.parametrize("D", SMALL)
def test_split_prime_detection(D):
    T = build_coefficients(enumerate_class_group(D), 5000)
    for p in sympy.primerange(2, 5001):
        lam = T.lam0[p]
        if p == D:
            assert lam == 1
        else:
            assert lam == {1: 2, -1: 0}[int(T.kron[p])]


@pytest.mark.parametrize("D", [23, 47, 3299])
def test_lambda_chi_multiplicative_and_self_dual(D):
    T = build_coefficients(enumerate_class_group(D), 10_000)
    m = T.group.exponent
    R = cyc.reduction_matrix(m)
    rings = T.rings
    assert np.array_equal(cyc.ring_conj(rings) @ R, rings @ R)
    for a in range(1, 101):
        for b in range(1, 101):
            if math.gcd(a, b) == 1:
                prod = cyc.ring_mul(rings[:, a], rings[:, b], m)
                assert np.array_equal(prod @ R, rings[:, a * b] @ R)
    assert np.allclose(T.lamChi.imag, 0.0, atol=1e-9)


def test_overflow_guard():
    with pytest.raises(OverflowError):
        build_coefficients(enumerate_class_group(7), 10**9)


# ---------------------------------------------------------------- identities


def test_hecke_examples():
    T = build_coefficients(enumerate_class_group(23), 100)
    lam = T.lamChi
    for k in range(3):
        assert np.isclose(lam[k, 4], lam[k, 2] ** 2 - T.kron[2] * lam[k, 1])
    T7 = build_coefficients(enumerate_class_group(7), 100)
    assert T7.kron[3] == -1
    assert T7.lamChi[0, 9] == T7.lamChi[0, 3] ** 2 + 1


@pytest.mark.parametrize("D", SMALL + [3299])
def test_hecke_relations_hold(D):
    T = build_coefficients(enumerate_class_group(D), 10_000)
    assert verify_hecke(T, 100, include_trivial=True) == []


def test_hecke_detects_corruption():
    T = build_coefficients(enumerate_class_group(23), 400)
    lamC = T.lamC.copy()
    lamC[1, 6] += 1
    bad = type(T)(T.group, T.N, lamC, T.kron)
    assert verify_hecke(bad, 20)


def test_hecke_range_error():
    T = build_coefficients(enumerate_class_group(23), 99)
    with pytest.raises(ValueError):
        verify_hecke(T, 10)


@pytest.mark.parametrize("D", SMALL + [3299])
def test_orthogonality_exact(D):
    T = build_coefficients(enumerate_class_group(D), 10_000)
    assert orthogonality_check(T) == {"forward": 0, "inverse": 0}


def test_orthogonality_detects_corruption():
    T = build_coefficients(enumerate_class_group(47), 200)
    rings = T.rings.copy()
    rings[2, 17, 0] += 1
    bad = type(T)(T.group, T.N, T.lamC, T.kron)
    bad.__dict__["rings"] = rings
    assert orthogonality_check(bad)["forward"] > 0


@pytest.mark.parametrize("D, h", [(7, 1), (23, 3), (163, 1), (2999, None)])
def test_class_number_formula(D, h):
    G = enumerate_class_group(D)
    rep = class_number_crosscheck(G, 10**6)
    assert rep["residual"] < 0.01
    assert rep["residual_bound"] < 0.01
    if h is not None:
        assert G.h == h
    assert math.isclose(rep["L1"], math.pi * G.h / math.sqrt(D), abs_tol=rep["tail_bound"])


def test_class_number_reference_value():
    rep = class_number_crosscheck(enumerate_class_group(7), 10**6)
    assert abs(rep["L1"] - 1.18741041172372594878) < 1e-5


def test_class_number_crosscheck_minimum_terms():
    with pytest.raises(ValueError):
        class_number_crosscheck(enumerate_class_group(7), 999)


def test_class_number_warns_on_loose_tail():
    with pytest.warns(RuntimeWarning):
        # max |S| = 410 over a period, so the tail bound is 0.82 at 1000 terms
        class_number_crosscheck(enumerate_class_group(99991), 1000)


# ---------------------------------------------------------------- prime ideals and representations


def test_prime_ideal_class_59_is_principal():
    G = enumerate_class_group(23)
    assert prime_ideal_class(G, 59) == (0, 0)
    assert find_representation(G.elements[0], 59) is not None


@pytest.mark.parametrize("D", [23, 47, 3299])
def test_find_representation(D):
    G = enumerate_class_group(D)
    T = build_coefficients(G, 3000)
    for i, f in enumerate(G.elements):
        for n in range(1, 3001):
            w = find_representation(f, n)
            assert (w is not None) == (T.lamC[i, n] > 0)
            if w is not None:
                assert f(*w) == n


# ---------------------------------------------------------------- serialization and cache


def test_json_roundtrip():
    G = enumerate_class_group(3299)
    doc = json.loads(G.to_json())
    assert set(doc) == {"D", "h", "forms", "structure", "generators"}
    assert ClassGroup.from_json(G.to_json()).elements == G.elements


def test_json_rejects_tampering():
    doc = json.loads(enumerate_class_group(23).to_json())
    doc["forms"][1] = [2, 1, 4]
    with pytest.raises(ValueError):
        ClassGroup.from_json(json.dumps(doc))


def test_cache_roundtrip_and_version(tmp_path, monkeypatch):
    G = cached_class_group(47, tmp_path)
    path = class_group_path(47, tmp_path)
    assert path.exists()
    assert cached_class_group(47, tmp_path).elements == G.elements
    doc = json.loads(path.read_text())
    doc["version"] = "0.0.0"
    doc["group"]["forms"] = []
    path.write_text(json.dumps(doc))
    # a stale file is ignored and rewritten
    assert cached_class_group(47, tmp_path).h == 5
    assert json.loads(path.read_text())["group"]["forms"]


def test_reduced_form_call_and_ordering():
    f = ReducedForm(2, 1, 3)
    assert f(1, 1) == 6
    assert f.inverse() == ReducedForm(2, -1, 3)
    assert sorted([ReducedForm(2, 1, 3), ReducedForm(1, 1, 6)])[0].a == 1
