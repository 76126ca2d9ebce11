import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpdyn import tensors as T

Z = np.array([0.0, 0.0, 1.0])


def field_exp(s):
    return lambda q: np.exp(s * np.linalg.norm(q)) / np.linalg.norm(q)


def test_static_dipole_tensor():
    t = T.apply_F_exp(0, 2 * Z).data
    assert t[2, 2] == pytest.approx(2 / 8)
    assert t[0, 0] == pytest.approx(-1 / 8)
    R = np.array([0.3, -1.1, 0.4])
    r = np.linalg.norm(R)
    rh = R / r
    assert np.allclose(T.apply_F_exp(0, R).data, -(np.eye(3) - 3 * np.outer(rh, rh)) / r**3)


@pytest.mark.parametrize("s", [0, 1, 1j, -0.5 + 2j, -3.0])
def test_exp_against_finite_differences(s):
    R = np.array([0.4, 0.7, -0.9])
    exact = T.apply_F_exp(s, R).data
    num = T.apply_F_numeric(field_exp(s), R, richardson=True).data
    assert np.linalg.norm(exact - num) / np.linalg.norm(exact) < 1e-6


def test_longitudinal_has_no_far_field():
    for k in (1.0, 5.0):
        R = 3 * Z
        t = T.apply_F_exp(1j * k, R).data
        near = 1j * k / 9 - 1 / 27
        assert t[2, 2] == pytest.approx(-2 * near * np.exp(3j * k), rel=1e-14)


def test_sinh_tensor():
    assert np.allclose(T.apply_F_sinh(0.0, 2 * Z).data, 0)
    R = 2 * Z
    num = T.apply_F_numeric(lambda q: np.sinh(np.linalg.norm(q)) / np.linalg.norm(q), R).data
    ex = T.apply_F_sinh(1.0, R).data
    assert np.linalg.norm(ex - num) / np.linalg.norm(ex) < 1e-6


@given(st.floats(1e-4, 30), st.floats(0.05, 5))
def test_sinh_odd(u, r):
    a = np.array(T.sinh_coeffs(np.array([u]), r))
    b = np.array(T.sinh_coeffs(np.array([-u]), r))
    assert np.allclose(a, -b, rtol=1e-12, atol=1e-300)


def test_sinh_series_branch_continuous():
    r = 1.0
    u = np.array([0.1 - 1e-12, 0.1])
    cP, cL = T.sinh_coeffs(u, r)
    assert abs(cP[0] - cP[1]) < 1e-12 and abs(cL[0] - cL[1]) < 1e-12


def test_sinh_shift_no_overflow():
    cP, cL = T.sinh_coeffs(np.array([800.0]), 1.0, shift=2.0)
    assert np.isfinite(cP[0]) and np.isfinite(cL[0]) and abs(cP[0]) < 1e-200


def test_sin_coeffs_match_kernel():
    from cpdyn.specfun import transverse_angular_kernel
    k, r = 2.3, 1.4
    cP, cL = T.sin_coeffs(k, r)
    rh = np.array([0.0, 0.6, 0.8])
    assert np.allclose(T.assemble(cP, cL, rh), k**3 * transverse_angular_kernel(k * r, rh))
    num = T.apply_F_numeric(lambda q: np.sin(k * np.linalg.norm(q)) / np.linalg.norm(q),
                            r * rh, richardson=True).data
    assert np.allclose(T.assemble(cP, cL, rh), num, atol=1e-8)


def test_numeric_static_and_constant():
    num = T.apply_F_numeric(lambda q: 1 / np.linalg.norm(q), 2 * Z, 1e-3).data
    ex = T.apply_F_exp(0, 2 * Z).data
    assert np.linalg.norm(num - ex) / np.linalg.norm(ex) < 1e-6
    assert np.allclose(T.apply_F_numeric(lambda q: 4.2, Z).data, 0, atol=1e-10)


def test_numeric_second_order():
    R = np.array([0.5, 0.5, 0.7])
    f = field_exp(0.5 + 1j)
    ex = T.apply_F_exp(0.5 + 1j, R).data
    e1 = np.linalg.norm(T.apply_F_numeric(f, R, 2e-2).data - ex)
    e2 = np.linalg.norm(T.apply_F_numeric(f, R, 1e-2).data - ex)
    assert 3.5 <= e1 / e2 <= 4.5


def test_errors():
    with pytest.raises(T.SingularityError):
        T.apply_F_exp(1, np.zeros(3))
    with pytest.raises(ValueError):
        T.apply_F_numeric(lambda q: 1.0, Z, h=0.5)
    with pytest.raises(FloatingPointError):
        T.apply_F_numeric(lambda q: np.nan, Z)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 1), st.floats(-4, 4),
       st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 0.3))
def test_exp_symmetric_and_fd(sr, si, v):
    s = complex(sr, si)
    R = np.array(v)
    ex = T.apply_F_exp(s, R).data
    assert np.allclose(ex, ex.T)
    num = T.apply_F_numeric(field_exp(s), R, richardson=True).data
    assert np.linalg.norm(ex - num) <= 1e-6 * np.linalg.norm(ex)
