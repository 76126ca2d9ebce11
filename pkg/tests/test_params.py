import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpdyn import params as P

vec = st.tuples(*[st.floats(-10, 10)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def unit(pol=None, **kw):
    return P.SystemParams(mu_A=kw.pop("mu", (1.0, 0.0, 0.0)), k0=kw.pop("k0", 1.0),
                          pol_B=pol or P.TwoLevel(1.0, 3.0), hbar_c=1.0, c=1.0, **kw)


def test_reduce_examples():
    pt = P.reduce(unit(), (0, 0, 2), 3.0)
    assert (pt.x, pt.tau) == (2.0, 3.0)
    assert np.allclose(pt.rhat, [0, 0, 1])
    pt = P.reduce(unit(k0=2.0), (0, 0, 1), 0.0)
    assert (pt.x, pt.tau) == (2.0, 0.0)


@given(vec, st.floats(0, 100))
def test_reduce_scale_invariant(R, t):
    a = P.reduce(unit(), R, t)
    b = P.reduce(unit(k0=2.0), np.array(R) / 2, t / 2)
    assert a.x == pytest.approx(b.x, rel=1e-14)
    assert a.tau == pytest.approx(b.tau, rel=1e-14, abs=1e-300)
    assert np.allclose(a.rhat, b.rhat, atol=1e-14)


def test_reduce_errors():
    with pytest.raises(P.DomainError):
        P.reduce(unit(), (0, 0, 0), 1.0)
    with pytest.raises(P.DomainError):
        P.reduce(unit(), (0, 0, 1), -1.0)


@pytest.mark.parametrize("mu,k0,e0", [((1, 0, 0), 1, 1), ((0, 2, 0), 1, 4), ((1, 0, 0), 2, 8)])
def test_energy_scale(mu, k0, e0):
    assert P.energy_scale(unit(mu=mu, k0=k0)) == pytest.approx(e0)


def test_alpha_imag_two_level():
    p = unit(P.TwoLevel(0.7, 2.5))
    assert P.alpha_B_imag(p, 0.0) == pytest.approx(2 * 0.7**2 / 2.5)
    u = np.linspace(0, 50, 200)
    a = P.alpha_B_imag(p, u)
    assert np.all(np.diff(a) < 0) and a[-1] < 1e-2 * a[0]
    assert np.allclose(P.alpha_B_imag(p, -u), a)


def test_alpha_real_two_level():
    p = unit(P.TwoLevel(1.0, 2.0))
    assert P.alpha_B_real(p, 1.0) == pytest.approx(4 / 3)
    assert P.alpha_B_real(p, 0.0) == pytest.approx(1.0)
    with pytest.raises(P.ResonancePoleError):
        P.alpha_B_real(p, 2.0)


def test_resonant_configuration_rejected():
    with pytest.raises(P.ResonancePoleError):
        unit(P.TwoLevel(1.0, 1.0))


def test_alpha_A_excited():
    p = unit(mu=(1.0, 2.0, 0.0))
    a = P.alpha_A_excited(p, 0.0)
    assert np.allclose(a, 2 * np.outer(p.mu, p.mu))
    assert np.linalg.matrix_rank(P.alpha_A_excited(p, 3.0)) == 1
    flipped = P.SystemParams(mu_A=p.mu_A, k0=1.0, pol_B=p.pol_B, hbar_c=1.0, c=1.0,
                             excited_sign="sign_flipped")
    assert np.allclose(P.alpha_A_excited(flipped, 0.4), -P.alpha_A_excited(p, 0.4))


def test_validity_check():
    assert P.validity_check(unit(), 1.0) == []
    assert len(P.validity_check(unit(gamma=1.0), 1.0)) == 1
    assert P.validity_check(unit(gamma=1.0), 0.01) == []


def test_tabulated():
    u = np.linspace(0, 10, 41)
    tab = P.Tabulated(u, 1 / (1 + u * u))
    assert tab(0.5) == pytest.approx(0.8, rel=1e-3)
    with pytest.raises(P.ExtrapolationError):
        tab(11.0)
    lin = P.Tabulated(u, 1 / (1 + u * u), rule="linear")
    assert lin(u[3]) == pytest.approx(1 / (1 + u[3] ** 2))
    with pytest.raises(P.DomainError):
        P.Tabulated([0, 2, 1], [1, 2, 3])
    p = unit(tab)
    with pytest.raises(P.DomainError):
        P.alpha_B_real(p, 1.0)
    p = unit(P.Tabulated(u, 1 / (1 + u * u), alpha_at_k0=0.3))
    assert P.alpha_B_real(p, 1.0) == 0.3


def test_invalid_inputs():
    with pytest.raises(P.DomainError):
        unit(k0=-1.0)
    with pytest.raises(P.DomainError):
        unit(P.StaticConstant(float("nan")))
    with pytest.raises(P.DomainError):
        P.SystemParams(mu_A=(1, 0), k0=1.0, pol_B=P.StaticConstant(1.0))
    with pytest.raises(P.DomainError):
        unit(excited_sign="upside_down")


def test_isotropic_projector():
    p = unit(mu=(3.0, 0, 0), isotropic=True)
    assert np.allclose(P.dipole_projector(p), np.eye(3) / 3)
    assert np.allclose(P.alpha_A_excited(p, 0.0), 2 * 9 / 3 * np.eye(3))


def test_resonant_alpha_choice():
    p = unit(P.TwoLevel(1.0, 2.0))
    q = P.SystemParams(mu_A=p.mu_A, k0=1.0, pol_B=p.pol_B, hbar_c=1.0, c=1.0,
                       resonant_alpha_choice="alpha_at_iu_equals_k0ImAxis")
    assert P.reduced_alpha_const(p) == pytest.approx(4 / 3)
    assert P.reduced_alpha_const(q) == pytest.approx(4 / 5)
