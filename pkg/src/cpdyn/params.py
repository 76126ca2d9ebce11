"""Physical inputs, units and polarizability models.

Everything is Gaussian (CGS). The numerical core works in reduced variables
x = k0 R, tau = c k0 t, with energies in E0 = |mu_A|^2 k0^3 and
polarizabilities in units of k0^-3.
"""

from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np
from scipy import constants
from scipy.interpolate import PchipInterpolator

# erg cm and cm/s
HBAR_C = constants.hbar * constants.c * 1e9
C_LIGHT = constants.c * 1e2

# relative gamma*t beyond which perturbation theory is suspect
VALIDITY_THRESHOLD = 0.1


class DomainError(ValueError):
    pass


class ResonancePoleError(ValueError):
    pass


class ExtrapolationError(ValueError):
    pass


@dataclass(frozen=True)
class TwoLevel:
    mu_B: float
    k_B: float

    def __post_init__(self):
        if not self.k_B > 0:
            raise DomainError("two_level B needs k_B > 0")
        if not np.isfinite(self.mu_B) or self.mu_B == 0:
            raise DomainError("two_level B needs a finite nonzero mu_B")


@dataclass(frozen=True)
class StaticConstant:
    alpha0: float

    def __post_init__(self):
        if not np.isfinite(self.alpha0):
            raise DomainError("alpha0 must be finite")


@dataclass(frozen=True)
class Tabulated:
    """alpha_B(iu) sampled on a u grid.

    ``alpha_at_k0`` is the real-frequency value alpha_B(k0). A table on the
    imaginary axis cannot supply it, so terms that need it raise unless given.
    """

    u: tuple
    alpha: tuple
    rule: Literal["pchip", "linear"] = "pchip"
    alpha_at_k0: Optional[float] = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        a = np.asarray(self.alpha, dtype=float)
        object.__setattr__(self, "u", tuple(u))
        object.__setattr__(self, "alpha", tuple(a))
        if u.ndim != 1 or u.shape != a.shape or u.size < 2:
            raise DomainError("table needs matching 1D u and alpha with >= 2 rows")
        if np.any(np.diff(u) <= 0):
            raise DomainError("table u grid must be strictly increasing")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(a))):
            raise DomainError("table values must be finite")
        if u[0] < 0:
            raise DomainError("table u grid must start at u >= 0")
        if self.rule not in ("pchip", "linear"):
            raise DomainError(f"unknown interpolation rule {self.rule!r}")

    def __call__(self, u):
        ug = np.asarray(self.u)
        u = np.asarray(u, dtype=float)
        if np.any(u < ug[0]) or np.any(u > ug[-1]):
            raise ExtrapolationError(
                f"u outside tabulated range [{ug[0]:g}, {ug[-1]:g}]")
        if self.rule == "linear":
            return np.interp(u, ug, self.alpha)
        return PchipInterpolator(ug, self.alpha)(u)


PolarizabilityB = Union[TwoLevel, StaticConstant, Tabulated]

ExcitedSign = Literal["as_printed", "sign_flipped"]
ResonantAlphaChoice = Literal["alpha_at_k0", "alpha_at_iu_equals_k0ImAxis"]


@dataclass(frozen=True)
class SystemParams:
    """Atom A (dipole mu_A, wavenumber k0) and atom B (polarizability model).

    ``isotropic`` replaces mu_m mu_n by |mu|^2 delta_mn / 3.
    ``resonant_alpha_choice`` picks the constant alpha_B that enters the
    time-dependent brackets: the real-frequency value alpha_B(k0) or the
    imaginary-axis value alpha_B(i k0).
    """

    mu_A: tuple
    k0: float
    pol_B: PolarizabilityB
    gamma: Optional[float] = None
    excited_sign: ExcitedSign = "as_printed"
    resonant_alpha_choice: ResonantAlphaChoice = "alpha_at_k0"
    isotropic: bool = False
    hbar_c: float = HBAR_C
    c: float = C_LIGHT

    def __post_init__(self):
        mu = np.asarray(self.mu_A, dtype=float).reshape(-1)
        if mu.shape != (3,) or not np.all(np.isfinite(mu)):
            raise DomainError("mu_A must be a finite 3-vector")
        object.__setattr__(self, "mu_A", tuple(mu))
        if not self.k0 > 0:
            raise DomainError("k0 must be > 0")
        if self.hbar_c <= 0 or self.c <= 0:
            raise DomainError("hbar_c and c must be > 0")
        if self.gamma is not None and self.gamma < 0:
            raise DomainError("gamma must be >= 0")
        if self.excited_sign not in ("as_printed", "sign_flipped"):
            raise DomainError(f"unknown excited_sign {self.excited_sign!r}")
        if self.resonant_alpha_choice not in ("alpha_at_k0", "alpha_at_iu_equals_k0ImAxis"):
            raise DomainError(
                f"unknown resonant_alpha_choice {self.resonant_alpha_choice!r}")
        if isinstance(self.pol_B, TwoLevel) and np.isclose(self.pol_B.k_B, self.k0, rtol=1e-12, atol=0):
            raise ResonancePoleError(
                "two_level B with k_B == k0 puts alpha_B(k0) on its pole; "
                "the two atoms must not be resonant")

    @property
    def mu(self):
        return np.array(self.mu_A)

    @property
    def mu_norm(self):
        return float(np.linalg.norm(self.mu_A))

    @property
    def mu_hat(self):
        return self.mu / self.mu_norm if self.mu_norm > 0 else self.mu


@dataclass(frozen=True)
class ReducedPoint:
    x: float
    tau: float
    orientation: tuple
    mu_hat_A: tuple

    def __post_init__(self):
        if not self.x > 0:
            raise DomainError("x must be > 0")
        if not self.tau >= 0:
            raise DomainError("tau must be >= 0")
        for name in ("orientation", "mu_hat_A"):
            v = np.asarray(getattr(self, name), dtype=float)
            n = np.linalg.norm(v)
            # a zero dipole is allowed: every energy then vanishes
            if name == "mu_hat_A" and n == 0:
                object.__setattr__(self, name, tuple(v))
                continue
            if abs(n - 1) > 1e-12:
                v = v / n
            object.__setattr__(self, name, tuple(v))

    @property
    def rhat(self):
        return np.array(self.orientation)

    @property
    def mu_hat(self):
        return np.array(self.mu_hat_A)


def reduce(params: SystemParams, R, t) -> ReducedPoint:
    R = np.asarray(R, dtype=float).reshape(3)
    r = float(np.linalg.norm(R))
    if r == 0:
        raise DomainError("zero separation: R must be nonzero")
    if t < 0:
        raise DomainError("t must be >= 0")
    return ReducedPoint(
        x=params.k0 * r,
        tau=params.c * params.k0 * t,
        orientation=tuple(R / r),
        mu_hat_A=tuple(params.mu_hat),
    )


def energy_scale(params: SystemParams) -> float:
    return params.mu_norm**2 * params.k0**3


def alpha_B_imag(params: SystemParams, u):
    """alpha_B(iu) for u >= 0 (the two-level form is even in u)."""
    u = np.asarray(u, dtype=float)
    pol = params.pol_B
    if isinstance(pol, TwoLevel):
        return 2 * pol.k_B * pol.mu_B**2 / (params.hbar_c * (pol.k_B**2 + u * u))
    if isinstance(pol, StaticConstant):
        return np.full_like(u, pol.alpha0) if u.ndim else float(pol.alpha0)
    if np.any(u < 0):
        raise DomainError("tabulated alpha_B(iu) needs u >= 0")
    return pol(u)


def alpha_B_real(params: SystemParams, k):
    """alpha_B(k) on the real frequency axis."""
    k = np.asarray(k, dtype=float)
    pol = params.pol_B
    if isinstance(pol, TwoLevel):
        if np.any(np.isclose(np.abs(k), pol.k_B, rtol=1e-12, atol=0)):
            raise ResonancePoleError(
                "alpha_B(k) evaluated at k = k_B; two_level B is singular there "
                "(no resonant degeneracy allowed)")
        return 2 * pol.k_B * pol.mu_B**2 / (params.hbar_c * (pol.k_B**2 - k * k))
    if isinstance(pol, StaticConstant):
        return np.full_like(k, pol.alpha0) if k.ndim else float(pol.alpha0)
    if pol.alpha_at_k0 is None:
        raise DomainError(
            "tabulated alpha_B carries imaginary-axis data only; set alpha_at_k0")
    if not np.allclose(k, params.k0, rtol=1e-12, atol=0):
        raise DomainError("tabulated alpha_B is known on the real axis only at k0")
    return np.full_like(k, pol.alpha_at_k0) if k.ndim else float(pol.alpha_at_k0)


def alpha_A_excited(params: SystemParams, u):
    """Excited-state polarizability tensor of A at imaginary frequency iu."""
    sigma = 1.0 if params.excited_sign == "as_printed" else -1.0
    u = float(u)
    pref = sigma * 2 * params.k0 / (params.hbar_c * (params.k0**2 + u * u))
    if params.isotropic:
        return pref * params.mu_norm**2 / 3 * np.eye(3)
    return pref * np.outer(params.mu, params.mu)


def validity_check(params: SystemParams, t) -> list:
    if params.gamma is None:
        return []
    gt = params.gamma * t
    if gt > VALIDITY_THRESHOLD:
        return [f"gamma*t = {gt:.3g} > {VALIDITY_THRESHOLD}: perturbative result "
                "unreliable once the excited state has decayed appreciably"]
    return []


# reduced-unit polarizabilities of B

def reduced_alpha_imag(params: SystemParams, ubar):
    return params.k0**3 * alpha_B_imag(params, params.k0 * np.asarray(ubar, dtype=float))


def reduced_alpha_const(params: SystemParams) -> float:
    """Reduced alpha_B constant used by the time-dependent brackets."""
    if params.resonant_alpha_choice == "alpha_at_k0":
        return float(params.k0**3 * alpha_B_real(params, params.k0))
    return float(params.k0**3 * alpha_B_imag(params, params.k0))


def reduced_alpha_k0(params: SystemParams) -> float:
    return float(params.k0**3 * alpha_B_real(params, params.k0))


def excited_sign_factor(params: SystemParams) -> float:
    return 1.0 if params.excited_sign == "as_printed" else -1.0


def dipole_projector(params: SystemParams):
    """Unit-normalized mu mu^T, or delta/3 in isotropic mode."""
    if params.isotropic:
        return np.eye(3) / 3
    m = params.mu_hat
    return np.outer(m, m)
