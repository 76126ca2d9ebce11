"""Time-dependent interaction energy of an excited atom A and a ground-state
atom B, and its static limit.

All three terms are computed in reduced units (k0 = 1, energies in
E0 = |mu_A|^2 k0^3) and scaled back at the boundary. hbar and c cancel from
every energy.
"""

import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import params as P
from .quad import integrate_semiinf
from .specfun import theta
from .tensors import assemble, exp_coeffs, exp_coeffs_real, sinh_coeffs

EPS_LC = 1e-3
TOL = 1e-9

# mode_sum: 1/(2 pi), the normalization reproduced by the mode-sum and
# single-sum routes; as_printed: 1/pi
DynamicNormalization = Literal["mode_sum", "as_printed"]
_DYN_PREF = {"mode_sum": 1 / (2 * np.pi), "as_printed": 1 / np.pi}


class LightConeError(ValueError):
    """ct lies in (R, R(1 + eps_lc)], where the dynamic integrals blow up."""


@dataclass(frozen=True)
class Terms:
    resonant: float
    cp_dispersion: float
    dynamic: float
    total: float

    @classmethod
    def of(cls, resonant, cp, dynamic):
        return cls(resonant, cp, dynamic, (resonant + cp) + dynamic)

    def scaled(self, e0):
        return Terms.of(e0 * self.resonant, e0 * self.cp_dispersion, e0 * self.dynamic)


@dataclass(frozen=True)
class PotentialBreakdown:
    resonant: float
    cp_dispersion: float
    dynamic: float
    total: float
    reduced: Terms
    at: P.ReducedPoint
    energy_unit: float
    err_est: float = 0.0
    warnings: tuple = field(default=())


def _weights(params, rhat):
    """tr(P D) and tr(L D) for the dipole projector D."""
    D = P.dipole_projector(params)
    L = np.outer(rhat, rhat)
    wL = float(np.einsum("ij,ji->", L, D))
    return float(np.trace(D)) - wL, wL


def _points(params):
    pts = [1.0]
    if isinstance(params.pol_B, P.TwoLevel):
        pts.append(params.pol_B.k_B / params.k0)
    return tuple(pts)


# reduced-unit terms

def reduced_resonant(params, pt):
    ak0 = P.reduced_alpha_k0(params)
    T = assemble(*exp_coeffs(1j, pt.x), pt.rhat)
    D = P.dipole_projector(params)
    z = np.einsum("ln,lm,mn->", T, T.conj(), D)
    if abs(z.imag) > 1e-10 * max(abs(z.real), 1e-300):
        raise ArithmeticError(f"resonant contraction not real: {z}")
    return -ak0 * float(z.real)


def cp_integrand(params, pt):
    wP, wL = _weights(params, pt.rhat)
    sigma = P.excited_sign_factor(params)

    def f(u):
        cP, cL = exp_coeffs_real(-u, pt.x)
        aB = P.reduced_alpha_imag(params, u)
        return sigma / (2 * np.pi) * 2 / (1 + u * u) * aB * (wP * cP * cP + wL * cL * cL)

    return f


def reduced_cp(params, pt, tol=TOL, rule="adaptive"):
    res = integrate_semiinf(cp_integrand(params, pt), 2 * pt.x, tol=tol,
                            points=_points(params), rule=rule)
    return float(res.value), res


def dynamic_integrand(params, pt):
    """Complex scalar u-integrand I(u); the term is pref * Re(e^{i tau} int I)."""
    wP, wL = _weights(params, pt.rhat)
    aP, aL = exp_coeffs(-1j, pt.x)
    ac = P.reduced_alpha_const(params)
    gap = pt.tau - pt.x

    def f(u):
        WP, WL = sinh_coeffs(u, pt.x, shift=pt.tau)
        g = (P.reduced_alpha_imag(params, u) + ac) * 2 * (1 - 1j * u) / (1 + u * u)
        return g * (wP * aP * WP + wL * aL * WL)

    return f, gap


def reduced_dynamic(params, pt, tol=TOL, rule="adaptive", eps_lc=EPS_LC,
                    normalization: DynamicNormalization = "mode_sum"):
    if pt.tau <= pt.x:
        return 0.0, None
    if pt.tau <= pt.x * (1 + eps_lc):
        raise LightConeError(
            f"tau = {pt.tau:.6g} within relative {eps_lc:g} of the light cone x = {pt.x:.6g}")
    f, gap = dynamic_integrand(params, pt)
    res = integrate_semiinf(f, gap, tol=tol, points=_points(params), rule=rule)
    val = _DYN_PREF[normalization] * (np.exp(1j * pt.tau) * res.value).real
    return float(val), res


# physical-unit API

def term_resonant(params, R):
    pt = P.reduce(params, R, 0.0)
    return P.energy_scale(params) * reduced_resonant(params, pt)


def term_cp_dispersion(params, R, tol=TOL, rule="adaptive"):
    pt = P.reduce(params, R, 0.0)
    return P.energy_scale(params) * reduced_cp(params, pt, tol, rule)[0]


def term_dynamic(params, R, t, tol=TOL, rule="adaptive", eps_lc=EPS_LC,
                 normalization: DynamicNormalization = "mode_sum"):
    pt = P.reduce(params, R, t)
    val, _ = reduced_dynamic(params, pt, tol, rule, eps_lc, normalization)
    return P.energy_scale(params) * val


def potential_static(params, R, tol=TOL):
    pt = P.reduce(params, R, 0.0)
    e0 = P.energy_scale(params)
    return e0 * reduced_resonant(params, pt) + e0 * reduced_cp(params, pt, tol)[0]


def potential_total(params, R, t, tol=TOL, rule="adaptive", eps_lc=EPS_LC,
                    normalization: DynamicNormalization = "mode_sum") -> PotentialBreakdown:
    pt = P.reduce(params, R, t)
    e0 = P.energy_scale(params)
    notes = tuple(P.validity_check(params, t))
    for w in notes:
        warnings.warn(w, RuntimeWarning, stacklevel=2)
    if theta(pt.tau - pt.x) == 0:
        red = Terms.of(0.0, 0.0, 0.0)
        err = 0.0
    else:
        res = reduced_resonant(params, pt)
        cp, rc = reduced_cp(params, pt, tol, rule)
        dyn, rd = reduced_dynamic(params, pt, tol, rule, eps_lc, normalization)
        red = Terms.of(res, cp, dyn)
        err = rc.err_est + _DYN_PREF[normalization] * rd.err_est
    phys = red.scaled(e0)
    return PotentialBreakdown(phys.resonant, phys.cp_dispersion, phys.dynamic, phys.total,
                              red, pt, e0, err, notes)
