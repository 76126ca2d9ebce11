import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from cpdyn.specfun import f_t, theta, transverse_angular_kernel

finite = st.floats(-1e3, 1e3, allow_nan=False)
times = st.floats(0, 50, allow_nan=False)


def brute_kernel(x, rhat, n=200):
    # Gauss-Legendre in cos(theta), trapezoid in phi
    c, w = np.polynomial.legendre.leggauss(n)
    phi = np.linspace(0, 2 * np.pi, 2 * n, endpoint=False)
    out = np.zeros((3, 3))
    for ci, wi in zip(c, w):
        s = np.sqrt(1 - ci * ci)
        k = np.stack([s * np.cos(phi), s * np.sin(phi), np.full_like(phi, ci)], axis=1)
        ph = np.cos(x * k @ rhat)
        t = np.eye(3)[None] - k[:, :, None] * k[:, None, :]
        out += wi * np.einsum("p,pij->ij", ph, t) * (2 * np.pi / phi.size)
    return out / (4 * np.pi)


def test_f_t_examples():
    assert f_t(0.0, 2.5) == pytest.approx(2.5)
    assert abs(f_t(1.0, np.pi) - 2j) < 1e-14


@given(finite, times)
def test_f_t_bounded_by_t(x, t):
    assert abs(f_t(x, t)) <= t * (1 + 1e-12) + 1e-300


@given(st.floats(-20, 20), st.floats(0.01, 5))
def test_f_t_matches_quadrature(x, t):
    re = quad(lambda s: np.cos(x * s), 0, t, limit=200)[0]
    im = quad(lambda s: np.sin(x * s), 0, t, limit=200)[0]
    assert abs(f_t(x, t) - complex(re, im)) < 1e-10 * max(1, t)


def test_f_t_series_branch_continuous():
    t = 3.0
    for z in (0.9e-4, 1e-4, 1.1e-4):
        x = z / t
        exact = t * np.expm1(1j * z) / (1j * z)
        assert abs(f_t(x, t) - exact) < 1e-13 * t


def test_f_t_vectorized_and_negative_t():
    v = f_t(np.array([0.0, 1.0, 2.0]), 1.0)
    assert v.shape == (3,)
    with pytest.raises(ValueError):
        f_t(1.0, -0.1)


def test_theta():
    assert theta(-1) == 0 and theta(1) == 1 and theta(0) == 0
    assert list(theta(np.array([-2.0, 0.0, 3.0]))) == [0, 0, 1]


def test_kernel_small_x():
    K = transverse_angular_kernel(0.0, np.array([0.0, 0.0, 1.0]))
    assert np.allclose(K, 2 / 3 * np.eye(3), atol=1e-15)


@pytest.mark.parametrize("x", [0.3, 1.0, 4.0, 9.5])
def test_kernel_components(x):
    K = transverse_angular_kernel(x, np.array([0.0, 0.0, 1.0]))
    s, c = np.sin(x), np.cos(x)
    assert K[2, 2] == pytest.approx(2 * (s / x**3 - c / x**2), abs=1e-13)
    assert K[0, 0] == pytest.approx(s / x - s / x**3 + c / x**2, abs=1e-13)


@pytest.mark.parametrize("x", [0.05, 1.7, 6.0])
def test_kernel_against_angular_quadrature(x):
    rhat = np.array([0.48, -0.6, 0.64])
    assert np.allclose(transverse_angular_kernel(x, rhat), brute_kernel(x, rhat), atol=1e-8)


@pytest.mark.parametrize("x", [0.5, 2.0, 7.0])
def test_kernel_trace(x):
    K = transverse_angular_kernel(x, np.array([0.0, 0.6, 0.8]))
    assert abs(np.trace(K) - 2 * np.sin(x) / x) < 1e-10


def test_kernel_series_switch():
    rhat = np.array([1.0, 0.0, 0.0])
    lo = transverse_angular_kernel(np.nextafter(1e-2, 0), rhat)
    hi = transverse_angular_kernel(1e-2, rhat)
    assert np.allclose(lo, hi, atol=1e-12)
