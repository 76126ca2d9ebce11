"""Independent mode-sum evaluations of the energy shift.

``oracle_eq5`` integrates the pair-correlation double sum over photon
wavenumbers (k, k') after doing both angular integrals analytically. No
step function is put in by hand: the signal before the light cone must
cancel numerically. ``oracle_eq7a`` integrates the single-sum form. Both use
Abel damping exp(-eta k) with eta -> 0 extrapolation, or a cutoff average.

Everything is in reduced units (k0 = 1); ``k_max`` and ``pv_offset`` are
given in units of k0. The quantization volume never enters: the 1/V of each
coupling and field amplitude is absorbed when the mode sum becomes
V/(2 pi)^3 times an integral, so no volume parameter exists here.

Only a frequency-independent alpha_B is supported. A two-level alpha_B(k)
has a pole on the real k axis and the undamped mode integrals through it are
not defined.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import params as P
from .quad import AccuracyError, QuadResult, adaptive_gk, integrate_osc_cutoff, richardson3
from .specfun import f_t
from .tensors import exp_coeffs, sin_coeffs

Regulator = Literal["exp_damping", "cutoff_averaging"]

# exp(-_TAIL) bounds the damped tail of every k sum
_TAIL = 40.0
_ETAS = (4.0, 2.0, 1.0)


@dataclass(frozen=True)
class OracleCtrl:
    k_max: float = 60.0
    tol: float = 1e-4
    regulator: Regulator = "exp_damping"
    pv_offset: float = 1e-6
    # spread allowed between the linear and quadratic eta -> 0 extrapolants,
    # relative to the regulated values, before the result is refused
    extrap_rtol: float = 1e-2

    def __post_init__(self):
        if self.k_max < 20:
            raise P.DomainError("k_max must be >= 20 k0")
        if not 1e-6 <= self.tol < 1:
            raise P.DomainError("tol must lie in [1e-6, 1)")
        if self.regulator not in ("exp_damping", "cutoff_averaging"):
            raise P.DomainError(f"unknown regulator {self.regulator!r}")
        if not 0 < self.pv_offset < 1e-2:
            raise P.DomainError("pv_offset must lie in (0, 1e-2)")


def _alpha0(params):
    if not isinstance(params.pol_B, P.StaticConstant):
        raise P.DomainError(
            "mode-sum oracles need a frequency-independent alpha_B (static_constant)")
    return params.k0**3 * params.pol_B.alpha0


def _dipole_amplitudes(params, pt, k):
    """Real rows a(k) with a(k).a(k') = mu S(k) S(k') mu."""
    D = P.dipole_projector(params)
    L = np.outer(pt.rhat, pt.rhat)
    wL = float(np.einsum("ij,ji->", L, D))
    wP = float(np.trace(D)) - wL
    sP, sL = sin_coeffs(k, pt.x)
    return np.stack([np.sqrt(wP) * sP, np.sqrt(wL) * sL], axis=1)


def _gl(edges, n):
    xg, wg = np.polynomial.legendre.leggauss(n)
    a = edges[:-1, None]
    b = edges[1:, None]
    return ((a + b) / 2 + (b - a) / 2 * xg).ravel(), ((b - a) / 2 * wg).ravel()


def _panel_width(pt):
    # keep the fastest phase k (t + x) to a few radians per panel
    return min(0.5, 4.0 / (pt.tau + 2 * pt.x))


def _p(k, t):
    return f_t(1 + k, t) * np.exp(-1j * k * t) - f_t(1 - k, t) * np.exp(1j * k * t)


def _d(k, s):
    """(e^{iks} - e^{is})/(1 - k) + (e^{iks} - e^{-is})/(1 + k) on an (s, k) grid."""
    ks = np.outer(s, k)
    eis = np.exp(1j * s)[:, None]
    first = eis * np.expm1(1j * np.outer(s, k - 1)) / (1 - k)[None, :]
    second = (np.exp(1j * ks) - np.exp(-1j * s)[:, None]) / (1 + k)[None, :]
    return first + second


def _s_grid(pt, width, n):
    t = pt.tau
    s0 = t - pt.x
    breaks = [0.0, t]
    breaks += list(np.linspace(0, t, int(4 * t) + 2))
    if 0 < s0 < t:
        # the retarded kernel sharpens to a step at s = t - x as the cutoff grows
        d = width * np.geomspace(0.25, 200, 30)
        breaks += list(s0 - d) + list(s0 + d) + [s0]
    br = np.unique(np.clip(breaks, 0, t))
    return _gl(br, n)


def _eq5_regulated(a0, params, pt, k, w, ns, width, gross=False):
    """One regulated evaluation of the double sum for k nodes with weights w.

    With ``gross`` also returns the summed magnitude of the two cancelling
    pieces, the natural scale for the result outside the light cone.
    """
    t = pt.tau
    a = _dipole_amplitudes(params, pt, k)
    wa = w[:, None] * a
    pv = _p(k, t) @ wa
    term_p = -float(np.vdot(pv, pv).real)
    s, ws = _s_grid(pt, width, ns)
    cross = 0.0
    phase = np.exp(-1j * k * t)
    for i0 in range(0, s.size, 48):
        ss = s[i0:i0 + 48]
        ret = np.sin(np.outer(t - ss, k)) @ wa
        u = np.real(_d(k, ss) * phase[None, :]) @ wa
        cross += float(np.sum(ws[i0:i0 + 48] * np.einsum("si,si->s", ret, u)))
    pref = a0 / (2 * np.pi**2)
    if gross:
        return pref * (term_p + 4 * cross), abs(pref) * (abs(term_p) + 4 * abs(cross))
    return pref * (term_p + 4 * cross)


def _k_nodes(pt, top, nk):
    h = _panel_width(pt)
    edges = np.append(np.arange(0, top, h), top)
    return _gl(edges, nk)


def _extrapolate(vals, qerr, ctrl, n, scale=0.0):
    quad, lin = richardson3(vals)
    spread = abs(quad - lin)
    scale = max([scale] + [abs(v) for v in vals])
    res = QuadResult(float(quad), float(spread + qerr), n)
    if spread > 10 * ctrl.extrap_rtol * scale:
        raise AccuracyError(f"eta extrapolants disagree (spread {spread:.3g})", res)
    if qerr > 10 * ctrl.tol * max(scale, 1e-300):
        raise AccuracyError(f"mode quadrature error {qerr:.3g} above tolerance", res)
    return res


def _require_damping(ctrl):
    # the mode integrands grow like powers of k while oscillating at a
    # continuum of frequencies; a cutoff average over one period cannot
    # tame that, only the analytic (Abel) continuation does
    if ctrl.regulator != "exp_damping":
        raise P.DomainError(
            "mode-sum oracles need regulator exp_damping: their integrands grow "
            "with k, and cutoff averaging only converges for bounded tails")


def oracle_eq5_reduced(params, pt, ctrl=OracleCtrl()):
    a0 = _alpha0(params)
    _require_damping(ctrl)
    n = 0
    vals = []
    qerr = 0.0
    scale = 0.0
    for c in _ETAS:
        eta = c / ctrl.k_max
        k, w = _k_nodes(pt, _TAIL / eta, 16)
        v, g = _eq5_regulated(a0, params, pt, k, w * np.exp(-eta * k), 10, eta, gross=True)
        scale = max(scale, g)
        n += k.size
        if c == _ETAS[-1]:
            kc, wc = _k_nodes(pt, _TAIL / eta, 12)
            vc = _eq5_regulated(a0, params, pt, kc, wc * np.exp(-eta * kc), 7, eta)
            qerr = abs(v - vc)
            n += kc.size
        vals.append(v)
    return _extrapolate(vals, qerr, ctrl, n, scale)


def oracle_eq5(params, R, t, ctrl=OracleCtrl()) -> QuadResult:
    """Mode-sum energy shift at separation R and time t (physical units)."""
    pt = P.reduce(params, R, t)
    e0 = P.energy_scale(params)
    if e0 == 0:
        return QuadResult(0.0, 0.0, 1)
    r = oracle_eq5_reduced(params, pt, ctrl)
    return QuadResult(e0 * r.value, e0 * r.err_est, r.n_evals)


def correlation_kernel(params, pt, k, kp, ns=400):
    """The (k, k') integrand of the double mode sum, in reduced units.

    Hermitian under k <-> k'. Used to check the structure of the sum; the
    production path factorizes the same integrand through the emission time.
    """
    a0 = _alpha0(params)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    kp = np.atleast_1d(np.asarray(kp, dtype=float))
    t = pt.tau
    ak = _dipole_amplitudes(params, pt, k)
    akp = _dipole_amplitudes(params, pt, kp)
    mumu = ak @ akp.T
    pp = -np.outer(_p(k, t), np.conj(_p(kp, t)))
    s, ws = _gl(np.linspace(0, t, max(2, int(8 * t) + 2)), 16) if t > 0 else (np.zeros(1), np.zeros(1))

    def g(k1, k2):
        ret = np.sin(np.outer(t - s, k1))
        u = np.real(_d(k2, s) * np.exp(-1j * k2 * t)[None, :])
        return np.einsum("s,si,sj->ij", ws, ret, u)

    sym = 2 * (g(k, kp) + g(kp, k).T)
    return a0 / (2 * np.pi**2) * mumu * (pp + sym)


# single-sum form

def _eq7a_integrand(a0, params, pt):
    D = P.dipole_projector(params)
    L = np.outer(pt.rhat, pt.rhat)
    wL = float(np.einsum("ij,ji->", L, D))
    wP = float(np.trace(D)) - wL
    t0P, t0L = exp_coeffs(-1j, pt.x)

    def f(k):
        sP, sL = sin_coeffs(k, pt.x)
        tP, tL = exp_coeffs(-1j * k, pt.x)
        ph = np.exp(1j * (1 - k) * pt.tau)
        bP = 2 * a0 * tP - 2 * a0 * ph * t0P
        bL = 2 * a0 * tL - 2 * a0 * ph * t0L
        return (wP * sP * bP + wL * sL * bL) / (1 - k)

    return f


def eq7a_integrand(params, pt, k, pv_offset=1e-6):
    """Single-sum integrand with the removable point k = 1 filled in."""
    f = _eq7a_integrand(_alpha0(params), params, pt)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty(k.shape, dtype=complex)
    near = np.abs(k - 1) < pv_offset
    if np.any(~near):
        out[~near] = f(k[~near])
    if np.any(near):
        out[near] = (f(np.array([1 - pv_offset])) + f(np.array([1 + pv_offset]))) / 2
    return out


def oracle_eq7a_reduced(params, pt, ctrl=OracleCtrl()):
    if not pt.tau > pt.x:
        raise P.DomainError("single-sum form holds inside the light cone only (tau > x)")
    _require_damping(ctrl)
    f = lambda k: eq7a_integrand(params, pt, k, ctrl.pv_offset)
    h = _panel_width(pt)
    vals = []
    qerr = 0.0
    n = 0
    for c in _ETAS:
        eta = c / ctrl.k_max
        top = (_TAIL + 5) / eta
        edges = np.append(np.arange(0, top, h), top)
        k, w = _gl(edges, 16)
        v = float(np.real(np.sum(w * np.exp(-eta * k) * f(k)))) / np.pi
        n += k.size
        if c == _ETAS[-1]:
            kc, wc = _gl(edges, 12)
            vc = float(np.real(np.sum(wc * np.exp(-eta * kc) * f(kc)))) / np.pi
            qerr = abs(v - vc)
            n += kc.size
        vals.append(v)
    return _extrapolate(vals, qerr, ctrl, n)


def oracle_eq7a(params, R, t, ctrl=OracleCtrl()) -> QuadResult:
    pt = P.reduce(params, R, t)
    e0 = P.energy_scale(params)
    if e0 == 0:
        return QuadResult(0.0, 0.0, 1)
    r = oracle_eq7a_reduced(params, pt, ctrl)
    return QuadResult(e0 * r.value, e0 * r.err_est, r.n_evals)


# principal-value identity

@dataclass(frozen=True)
class PVRow:
    label: str
    x: float
    value: complex
    expected: complex
    rel_err: float
    passed: bool
    counted: bool


@dataclass(frozen=True)
class PVReport:
    rows: tuple
    tol: float

    @property
    def passed(self):
        return all(r.passed for r in self.rows if r.counted)


def principal_value(alpha, x, k0=1.0, k_max=60.0, tol=1e-4, poles=()):
    """P int_{-inf}^{inf} dk e^{ikx} alpha(k) / (k + k0), symmetric about -k0."""
    def g(q):
        q = np.asarray(q, dtype=float)
        return (np.exp(1j * q * x) * alpha(q - k0) - np.exp(-1j * q * x) * alpha(-q - k0)) / q

    parts = lambda q: np.stack([g(q).real, g(q).imag], axis=1)
    period = 2 * np.pi / abs(x)
    # place panel edges on the nearly-real poles of alpha
    head = None
    edges = sorted({abs(p + k0) for p in poles} | {abs(p - k0) for p in poles})
    edges = [e for e in edges if 0 < e < k_max]
    if edges:
        fine = []
        for e in edges:
            fine += [e * (1 - 1e-2), e * (1 - 1e-4), e, e * (1 + 1e-4), e * (1 + 1e-2)]
        top = max(edges) * 1.5
        head = adaptive_gk(parts, [0.0] + fine + [top], tol=tol * 1e-3)
        rest = integrate_osc_cutoff(lambda q: parts(q + top), k_max, "exp_damping",
                                    tol=tol, period=period)
        v = head.value + rest.value
        err = head.err_est + rest.err_est
    else:
        rest = integrate_osc_cutoff(parts, k_max, "exp_damping", tol=tol, period=period)
        v = rest.value
        err = rest.err_est
    # k = q - k0 shifts the phase out of the q integral
    return np.exp(-1j * k0 * x) * complex(v[0], v[1]), err


def pv_identity_selftest(ctrl=OracleCtrl(), R=1.7, tol=1e-3) -> PVReport:
    """Check P int e^{ikx} alpha(k)/(k+k0) = i pi (2 theta(x) - 1) e^{-ik0 x} alpha(k0).

    The identity needs alpha analytic in the half plane the contour closes
    in: a damped two-level alpha is taken retarded for x > 0 and advanced for
    x < 0. The retarded form at x < 0 is listed for contrast, not counted.
    """
    k0 = 1.0
    kB, mu2, eps = 2.0, 1.0, 1e-4
    const = lambda k: np.full_like(np.asarray(k, dtype=float), 1.3, dtype=complex)
    ret = lambda k: 2 * kB * mu2 / (kB**2 - k * k - 1j * eps * k)
    adv = lambda k: 2 * kB * mu2 / (kB**2 - k * k + 1j * eps * k)
    poles = (kB,)
    cases = [
        ("constant, x > 0", const, R, (), True),
        ("constant, x < 0", const, -R, (), True),
        ("two_level retarded, x > 0", ret, R, poles, True),
        ("two_level advanced, x < 0", adv, -R, poles, True),
        ("two_level retarded, x < 0", ret, -R, poles, False),
    ]
    rows = []
    for label, alpha, x, pl, counted in cases:
        val, _ = principal_value(alpha, x, k0, max(ctrl.k_max, 60.0) / abs(x), ctrl.tol, pl)
        expected = 1j * np.pi * (1 if x > 0 else -1) * np.exp(-1j * k0 * x) * complex(alpha(np.array(k0)))
        rel = abs(val - expected) / abs(expected)
        rows.append(PVRow(label, x, val, expected, float(rel), bool(rel < tol), counted))
    return PVReport(tuple(rows), tol)
