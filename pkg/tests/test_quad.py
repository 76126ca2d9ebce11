import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpdyn.quad import (AccuracyError, adaptive_gk, exp_sinh, integrate_interval,
                        integrate_osc_cutoff, integrate_semiinf, richardson3, tanh_sinh)


def test_semiinf_exponential():
    r = integrate_semiinf(lambda u: np.exp(-u), 1.0)
    assert abs(r.value - 1) < 1e-10
    assert r.err_est < 1e-8


def test_semiinf_zero():
    r = integrate_semiinf(lambda u: np.zeros_like(u), 1.0)
    assert r.value == 0 and r.err_est == 0


def test_semiinf_dual_rules():
    f = lambda u: np.exp(-u) * u / (1 + u * u)
    a = integrate_semiinf(f, 1.0, tol=1e-11).value
    b = integrate_semiinf(f, 1.0, tol=1e-11, rule="de").value
    assert abs(a - b) < 1e-8 * abs(a)


def test_semiinf_complex_and_vector():
    r = integrate_semiinf(lambda u: np.exp(-(1 - 2j) * u), 1.0)
    assert abs(r.value - 1 / (1 - 2j)) < 1e-10
    r = integrate_semiinf(lambda u: np.stack([np.exp(-u), np.exp(-2 * u)], axis=1), 1.0)
    assert np.allclose(r.value, [1, 0.5], atol=1e-10)


def test_interval():
    assert abs(integrate_interval(np.sin, 0, np.pi).value - 2) < 1e-10
    assert integrate_interval(lambda u: np.ones_like(u), 0, 1).value == pytest.approx(1)
    f = lambda u: np.sin(40 * u) / (1 + u)
    a = integrate_interval(f, 0, 1, tol=1e-12).value
    b = integrate_interval(f, 0, 1, tol=1e-12, rule="de").value
    assert abs(a - b) < 1e-8 * abs(a)


def test_bad_arguments():
    with pytest.raises(ValueError):
        integrate_semiinf(np.exp, 1.0, tol=0)
    with pytest.raises(ValueError):
        integrate_semiinf(np.exp, -1.0)
    with pytest.raises(ValueError):
        integrate_interval(np.sin, 1, 0)
    with pytest.raises(ValueError):
        integrate_semiinf(np.exp, 1.0, rule="simpson")


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 20), st.floats(0, 10))
def test_semiinf_damped_cosine(a, w):
    # int_0^inf e^{-a u} cos(w u) = a/(a^2+w^2)
    r = integrate_semiinf(lambda u: np.exp(-a * u) * np.cos(w * u), a, tol=1e-10)
    exact = a / (a * a + w * w)
    assert abs(r.value - exact) <= max(1e-9 * abs(exact), 5 * r.err_est)


@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_interval_polynomial_exact(c, b):
    r = integrate_interval(lambda u: u**5 + c * u, 0, b)
    assert r.value == pytest.approx(b**6 / 6 + c * b * b / 2, rel=1e-12, abs=1e-12)


def test_de_rules_directly():
    assert abs(tanh_sinh(np.sqrt, 0, 1).value - 2 / 3) < 1e-10
    assert abs(exp_sinh(lambda u: u * np.exp(-u)).value - 1) < 1e-10


def test_adaptive_deterministic():
    f = lambda u: np.sin(u) ** 2 * np.exp(-u / 5)
    a = adaptive_gk(f, [0, 3, 40])
    b = adaptive_gk(f, [0, 3, 40])
    assert a.value == b.value and a.n_evals == b.n_evals


def test_richardson3():
    # v(eta) = 1 + 2 eta + 3 eta^2 is reproduced exactly
    v = [1 + 2 * e + 3 * e * e for e in (0.4, 0.2, 0.1)]
    q, lin = richardson3(v)
    assert q == pytest.approx(1, abs=1e-14)
    assert lin == pytest.approx(1 - 3 * 0.02, abs=1e-14)


def test_osc_dirichlet():
    r = integrate_osc_cutoff(lambda k: np.sinc(k / np.pi), 200.0, tol=1e-5)
    assert abs(r.value - np.pi / 2) < 1e-4


def test_osc_decaying_is_plain():
    f = lambda k: np.exp(-k)
    r = integrate_osc_cutoff(f, 60.0)
    assert abs(r.value - integrate_semiinf(f, 1.0).value) < 1e-8


def test_osc_regulators_agree():
    for f in (lambda k: np.sin(k) / (1 + k), lambda k: np.cos(2 * k) * np.exp(-k / 30)):
        a = integrate_osc_cutoff(f, 100.0, "exp_damping", tol=1e-4)
        b = integrate_osc_cutoff(f, 100.0, "cutoff_averaging", tol=1e-4)
        assert abs(a.value - b.value) <= a.err_est + b.err_est


def test_osc_error_estimates_honest():
    a = 1 / 30
    exact = a / (a * a + 4)
    for reg in ("exp_damping", "cutoff_averaging"):
        r = integrate_osc_cutoff(lambda k: np.cos(2 * k) * np.exp(-a * k), 100.0, reg, tol=1e-4)
        assert abs(r.value - exact) <= r.err_est


def test_osc_refuses_divergent():
    with pytest.raises(AccuracyError):
        integrate_osc_cutoff(lambda k: np.cos(k) * k, 40.0, tol=1e-6)
