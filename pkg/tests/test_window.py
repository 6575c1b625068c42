import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linniksieve.window import GeometricPartition, SmoothWindow, smoothstep


def mp_window(w):
    qmax = mpmath.mpf(w.u1 - w.u0) ** 2 / 4

    def phi(u):
        q = (u - w.u0) * (w.u1 - u)
        return mpmath.exp(w.sharpness * (1 / qmax - 1 / q)) if q > 0 else mpmath.mpf(0)

    return phi


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        SmoothWindow(0.5, 0.5)
    with pytest.raises(ValueError):
        SmoothWindow(0.5, 1.0, sharpness=0.0)


@pytest.mark.parametrize("u0, u1", [(0.5, 1.0), (0.6, 0.9), (0.0, 2.0)])
def test_shape(u0, u1):
    w = SmoothWindow(u0, u1)
    assert w((u0 + u1) / 2) == pytest.approx(1.0)
    outside = np.array([u0 - 1, u0, u1, u1 + 0.3])
    assert not np.any(w(outside))
    inside = np.linspace(u0, u1, 1001)[1:-1]
    assert np.all(w(inside) >= 0) and np.all(w(inside) <= 1.0 + 1e-15)
    # strictly positive wherever exp does not underflow
    core = np.linspace(u0, u1, 1001)[200:-200]
    assert np.all(w(core) > 0)


def test_smooth_at_the_edges():
    # finite-difference derivatives stay bounded and die off at both ends
    w = SmoothWindow(0.0, 2.0)
    h = 1e-3
    u = np.arange(-50, 2051) * h
    for k in range(1, 4):
        d = np.diff(w(u), n=k) / h**k
        assert np.max(np.abs(d)) < 1e3
        assert np.max(np.abs(d[:60])) < 1e-8 and np.max(np.abs(d[-60:])) < 1e-8


def test_mass_two_ways():
    w = SmoothWindow(0.5, 1.0)
    gauss = w.integral(lambda u: np.ones_like(u)).real
    ref = mpmath.quad(mp_window(w), [0.5, 0.75, 1.0])
    assert w.mass == pytest.approx(float(ref), rel=1e-10)
    assert gauss == pytest.approx(float(ref), rel=1e-12)
    assert w.mass > 0


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 20))
def test_fourier_symmetry(xi):
    w = SmoothWindow(0.5, 1.0)
    a, b = w.fourier(xi), w.fourier(-xi)
    assert abs(a - b.conjugate()) < 1e-9
    assert abs(a) <= w.mass + 1e-9


@pytest.mark.parametrize("s", [2.0, 0.5 + 3j, -1 + 10j])
def test_mellin_against_mpmath(s):
    w = SmoothWindow(0.5, 1.0)
    phi = mp_window(w)
    ref = mpmath.quad(lambda u: phi(u) * u ** (s - 1), [0.5, 0.75, 1.0])
    assert w.mellin(s) == pytest.approx(complex(ref), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("t", [0.0, 5.0, 40.0, 300.0])
def test_log_mellin_against_mpmath(t):
    w = SmoothWindow(0.6, 0.9)
    x = 1e5
    L = math.log(x)
    s = 0.5 + 1j * t
    phi = mp_window(w)
    mpmath.mp.dps = 30
    try:
        pts = np.linspace(0.6, 0.9, 2 + int(t)).tolist()
        ref = mpmath.quad(lambda u: phi(u) * mpmath.exp((s - 1) * u * L) / u, pts)
    finally:
        mpmath.mp.dps = 15
    got = w.log_mellin([s], x)[0]
    # the phase t u log x is only known to eps * t log x, times the integrand's L1 mass
    floor = 4 * np.finfo(float).eps * (1 + abs(s) * L) * w.integral(lambda u: x ** (-u / 2) / u).real
    assert abs(got - complex(ref)) <= 1e-10 * abs(complex(ref)) + floor


@pytest.mark.parametrize("x", [1e4, 1e6])
def test_third_derivative_bound(x):
    w = SmoothWindow(0.6, 0.9)
    W = w.third_derivative_weight(x)
    ts = np.array([1.0, 5.0, 20.0, 80.0, 200.0])
    vals = np.abs(w.log_mellin(0.5 + 1j * ts, x))
    bound = W / np.abs((0.5 - 1j * ts) * math.log(x)) ** 3
    assert np.all(vals <= bound)


# ---------------------------------------------------------------- smoothstep and partitions


def test_smoothstep_ends():
    assert smoothstep(-1.0) == 0.0 and smoothstep(0.0) == 0.0
    assert smoothstep(1.0) == 1.0 and smoothstep(5.0) == 1.0
    assert smoothstep(0.5) == pytest.approx(0.5)


@given(st.floats(-2, 3))
def test_smoothstep_reflection(t):
    assert smoothstep(t) + smoothstep(1 - t) == pytest.approx(1.0, abs=1e-15)


def test_smoothstep_monotone():
    t = np.linspace(-0.5, 1.5, 4001)
    assert np.all(np.diff(smoothstep(t)) >= 0)


def test_partition_rejects_bad_parameters():
    with pytest.raises(ValueError):
        GeometricPartition(3.0, 2)
    with pytest.raises(ValueError):
        GeometricPartition(6.0, 0)


@pytest.mark.parametrize("r, J", [(6.0, 1), (6.0, 3), (10.0, 4), (25.0, 6)])
def test_partition_sums(r, J):
    P = GeometricPartition(r, J)
    t = np.exp(np.linspace(math.log(1 / r), math.log(1 / 3), 3001))
    assert np.allclose(P.upper(t), 1.0, atol=1e-14)
    lo = P.lower(t)
    assert np.all(lo >= 0) and np.all(lo <= 1 + 1e-14)
    # outside [1/r, 1/3] the lower sum vanishes, the upper one only leaks half a step
    out_lo = np.array([0.5 / r, 0.99 / r, 1.01 / 3, 0.5])
    assert not np.any(P.lower(out_lo))
    far = np.array([P.alpha**-0.6 / r, P.alpha ** (J + 0.6) / r])
    assert not np.any(P.upper(far))


@pytest.mark.parametrize("j", [1.0, 1.5, 2.0, 2.5])
def test_adjacent_bumps_fill_overlap(j):
    P = GeometricPartition(10.0, 4)
    v = np.linspace(j - 0.5, j, 201)
    t = P.alpha**v / P.r
    assert np.allclose(P.bump(j, t) + P.bump(j + 0.5, t), 1.0, atol=1e-14)
    # support of h_j in v is [j - 1, j]
    assert not np.any(P.bump(j, P.alpha ** np.array([j - 1.05, j + 0.05]) / P.r))


def test_points_are_geometric():
    P = GeometricPartition(6.0, 3)
    x = 1e6
    assert P.point(0, x) == pytest.approx(x ** (1 / 6))
    assert P.point(3, x) == pytest.approx(x ** (1 / 3))
    logs = [math.log(math.log(P.point(j, x))) for j in range(4)]
    assert np.allclose(np.diff(logs), math.log(P.alpha))
