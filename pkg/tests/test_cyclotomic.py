import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from linniksieve import cyclotomic as cyc

MODULI = [1, 2, 3, 4, 5, 6, 9, 12, 15, 25]


@pytest.mark.parametrize("m", MODULI)
def test_reduction_agrees_with_complex_value(m):
    rng = np.random.default_rng(m)
    v = rng.integers(-5, 6, size=(20, m))
    red = cyc.reduce(v, m)
    deg = red.shape[-1]
    zeta = np.exp(2j * np.pi / m)
    back = red @ zeta ** np.arange(deg)
    assert np.allclose(back, cyc.to_complex(v, m), atol=1e-9)


@pytest.mark.parametrize("m", [3, 5, 9])
def test_sum_of_all_roots_reduces_to_zero(m):
    assert not np.any(cyc.reduce(np.ones(m, dtype=np.int64), m))


@pytest.mark.parametrize("m", MODULI)
def test_mult_tensor_matches_ring_mul(m):
    rng = np.random.default_rng(100 + m)
    a = rng.integers(-3, 4, size=m)
    b = rng.integers(-3, 4, size=m)
    ra, rb = cyc.reduce(a, m), cyc.reduce(b, m)
    T = cyc.mult_tensor(m)
    via_tensor = np.einsum("i,j,ijk->k", ra, rb, T)
    assert np.array_equal(via_tensor, cyc.reduce(cyc.ring_mul(a, b, m), m))


@given(st.integers(1, 12), st.data())
def test_conjugation_is_complex_conjugate(m, data):
    v = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=m, max_size=m)))
    assert np.allclose(cyc.to_complex(cyc.ring_conj(v), m), np.conj(cyc.to_complex(v, m)))


def test_ring_from_int_is_scalar():
    v = cyc.ring_from_int([3, -2], 5)
    assert v.shape == (2, 5)
    assert np.allclose(cyc.to_complex(v, 5), [3, -2])
