import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpdyn import params as P
from cpdyn.oracle import (OracleCtrl, correlation_kernel, eq7a_integrand, oracle_eq5,
                          oracle_eq7a, principal_value, pv_identity_selftest)
from cpdyn.potential import potential_total

Z = np.array([0.0, 0.0, 1.0])

# frozen single-sum values at the default control (reduced units, mu = (1, 0, 0.5), alpha_B = 1)
SINGLE_SUM_FROZEN = [(1.0, 3.0, -1.8700649554247832), (2.0, 6.0, -0.21794471735010915)]


@pytest.mark.parametrize("x,tau,value", SINGLE_SUM_FROZEN)
def test_single_sum_frozen(unit_static, x, tau, value):
    r = oracle_eq7a(unit_static, x * Z, tau)
    assert r.value / 1.25 == pytest.approx(value, rel=1e-9)


def test_single_sum_matches_closed_form(unit_static):
    cf = potential_total(unit_static, 2 * Z, 6.0).total
    r = oracle_eq7a(unit_static, 2 * Z, 6.0)
    assert abs(r.value / cf - 1) < 0.01


def test_double_sum_matches_closed_form_and_single_sum(unit_static):
    cf = potential_total(unit_static, 2 * Z, 6.0).total
    a = oracle_eq5(unit_static, 2 * Z, 6.0)
    b = oracle_eq7a(unit_static, 2 * Z, 6.0)
    assert abs(a.value / cf - 1) < 0.02
    assert abs(a.value - b.value) <= a.err_est + b.err_est


def test_zero_dipole():
    p = P.SystemParams(mu_A=(0, 0, 0), k0=1.0, pol_B=P.StaticConstant(1.0), hbar_c=1.0, c=1.0)
    assert oracle_eq5(p, Z, 3.0).value == 0.0
    assert oracle_eq7a(p, Z, 3.0).value == 0.0


def test_static_constant_only(unit_two_level):
    with pytest.raises(P.DomainError):
        oracle_eq7a(unit_two_level, Z, 3.0)
    with pytest.raises(P.DomainError):
        oracle_eq5(unit_two_level, Z, 3.0)


def test_cutoff_averaging_refused(unit_static):
    ctrl = OracleCtrl(regulator="cutoff_averaging")
    with pytest.raises(P.DomainError):
        oracle_eq7a(unit_static, Z, 3.0, ctrl)


def test_single_sum_needs_inside_light_cone(unit_static):
    with pytest.raises(P.DomainError):
        oracle_eq7a(unit_static, Z, 0.5)


@pytest.mark.parametrize("kw", [{"k_max": 5}, {"tol": 0}, {"regulator": "hard"},
                                {"pv_offset": 0.5}])
def test_ctrl_validation(kw):
    with pytest.raises(P.DomainError):
        OracleCtrl(**kw)


def test_single_sum_integrand_regular_at_resonance(unit_static):
    pt = P.reduce(unit_static, 1.3 * Z, 3.1)
    d = 1e-4
    f0 = eq7a_integrand(unit_static, pt, np.array([1.0]))[0]
    near = eq7a_integrand(unit_static, pt, np.array([1 - d, 1 + d]))
    scale = np.max(np.abs(near))
    assert np.isfinite(f0)
    assert abs(f0 - near.mean()) < 1e-6 * scale


@settings(max_examples=10, deadline=None)
@given(st.lists(st.floats(0.05, 8), min_size=1, max_size=3),
       st.lists(st.floats(0.05, 8), min_size=1, max_size=3),
       st.floats(0.3, 3), st.floats(0.5, 4))
def test_kernel_hermitian(k, kp, x, tau):
    p = P.SystemParams(mu_A=(1.0, 0.4, 0.5), k0=1.0, pol_B=P.StaticConstant(1.0),
                       hbar_c=1.0, c=1.0)
    pt = P.reduce(p, x * np.array([0.6, 0.0, 0.8]), tau)
    A = correlation_kernel(p, pt, k, kp)
    B = correlation_kernel(p, pt, kp, k)
    assert np.allclose(A, B.T.conj(), atol=1e-12 * max(1.0, np.max(np.abs(A))))


def test_pv_identity():
    rep = pv_identity_selftest()
    assert rep.passed
    counted = [r for r in rep.rows if r.counted]
    assert len(counted) == 4 and all(r.rel_err < 1e-3 for r in counted)
    # the retarded form closed the wrong way is not analytic there
    assert not [r for r in rep.rows if not r.counted][0].passed


def test_pv_constant_sign():
    c = lambda k: np.full_like(np.asarray(k, float), 2.0, dtype=complex)
    for x in (0.8, -0.8):
        v, _ = principal_value(c, x, 1.0, 80.0)
        exp = 1j * np.pi * np.sign(x) * np.exp(-1j * x) * 2.0
        assert abs(v - exp) < 1e-3 * abs(exp)
