"""The operator F_ln = -delta_ln lap + d_l d_n applied to radial waves.

For a radial function f(R) the result splits on the projectors
P = delta - RR (transverse) and L = RR (longitudinal):

    F f = -(f'' + f'/R) P - (2 f'/R) L

so every tensor here is carried internally as a (P, L) coefficient pair.
The ``*_coeffs`` helpers are vectorized over their first argument.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .specfun import _kernel_coeffs

# below this u*R the sinh combination is summed as a series
_SINH_SERIES = 0.1


class SingularityError(ValueError):
    pass


@dataclass(frozen=True)
class FieldTensor:
    data: np.ndarray
    s: complex
    R: tuple

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def _split(R):
    R = np.asarray(R, dtype=float).reshape(3)
    r = float(np.linalg.norm(R))
    if r == 0:
        raise SingularityError("F applied at R = 0")
    return r, R / r


def projectors(rhat):
    L = np.outer(rhat, rhat)
    return np.eye(3) - L, L


def assemble(cP, cL, rhat):
    """Coefficient pair(s) -> 3x3 tensor(s)."""
    P, L = projectors(rhat)
    cP = np.asarray(cP)
    cL = np.asarray(cL)
    return cP[..., None, None] * P + cL[..., None, None] * L


def exp_coeffs(s, r, with_exp=True):
    """(P, L) coefficients of F[e^{sR}/R]; optionally without the e^{sR} factor."""
    s = np.asarray(s, dtype=complex)
    near = s / r**2 - 1 / r**3
    cP = -s * s / r + near
    cL = -2 * near
    if with_exp:
        e = np.exp(s * r)
        cP, cL = cP * e, cL * e
    return cP, cL


def exp_coeffs_real(u, r):
    """Real version for s = u on the real axis (e^{uR} included)."""
    u = np.asarray(u, dtype=float)
    near = u / r**2 - 1 / r**3
    e = np.exp(u * r)
    return (-u * u / r + near) * e, -2 * near * e


def _h1_series(y):
    # y cosh y - sinh y = sum_{n>=1} 2n y^(2n+1)/(2n+1)!
    out = np.zeros_like(y)
    for n in range(1, 7):
        out += 2 * n * y ** (2 * n + 1) / factorial(2 * n + 1)
    return out


def sinh_coeffs(u, r, shift=0.0):
    """(P, L) coefficients of exp(-u*shift) * F[sinh(uR)/R].

    The damping factor is folded into the exponentials so large u does not
    overflow when shift > r.
    """
    u = np.asarray(u, dtype=float)
    y = u * r
    small = np.abs(y) < _SINH_SERIES
    h1 = np.empty_like(y)
    sh = np.empty_like(y)
    ys = y[small]
    damp = np.exp(-u[small] * shift)
    h1[small] = _h1_series(ys) * damp
    sh[small] = np.sinh(ys) * damp
    yb = y[~small]
    ub = u[~small]
    ep = np.exp(yb - ub * shift)
    em = np.exp(-yb - ub * shift)
    h1[~small] = ((yb - 1) * ep + (yb + 1) * em) / 2
    sh[~small] = (ep - em) / 2
    cP = (h1 - y * y * sh) / r**3
    cL = -2 * h1 / r**3
    return cP, cL


def sin_coeffs(k, r):
    """(P, L) coefficients of F[sin(kR)/R] = k^3 K(kR), k >= 0."""
    k = np.asarray(k, dtype=float)
    a, b = _kernel_coeffs(np.abs(k) * r)
    k3 = k**3
    return k3 * a, k3 * (a + b)


def apply_F_exp(s, R) -> FieldTensor:
    r, rhat = _split(R)
    cP, cL = exp_coeffs(complex(s), r)
    return FieldTensor(assemble(cP, cL, rhat), complex(s), tuple(np.asarray(R, float)))


def apply_F_sinh(u, R) -> FieldTensor:
    r, rhat = _split(R)
    cP, cL = sinh_coeffs(np.array([float(u)]), r)
    return FieldTensor(assemble(cP[0], cL[0], rhat), complex(u), tuple(np.asarray(R, float)))


def apply_F_numeric(field, R, h=None, richardson=False) -> FieldTensor:
    """Central finite differences of (-delta lap + grad grad) field at R.

    ``field`` maps a 3-vector to a scalar. Second order in h; h defaults to
    1e-3 |R|. With ``richardson`` the h and h/2 results are combined into a
    fourth-order estimate (the plain stencil's error on 1/R-type fields is
    about (h/R)^2).
    """
    R = np.asarray(R, dtype=float).reshape(3)
    r = float(np.linalg.norm(R))
    if h is None:
        h = 1e-3 * r
    if not 0 < h < r / 10:
        raise ValueError("need 0 < h < |R|/10")
    E = np.eye(3) * h

    def f(v):
        val = complex(field(v))
        if not np.isfinite(val):
            raise FloatingPointError(f"non-finite field sample at {v}")
        return val

    f0 = f(R)
    H = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        H[i, i] = (f(R + E[i]) - 2 * f0 + f(R - E[i])) / h**2
        for j in range(i + 1, 3):
            H[i, j] = H[j, i] = (f(R + E[i] + E[j]) - f(R + E[i] - E[j])
                                 - f(R - E[i] + E[j]) + f(R - E[i] - E[j])) / (4 * h * h)
    out = -np.trace(H) * np.eye(3) + H
    if richardson:
        half = apply_F_numeric(field, R, h / 2).data
        out = (4 * half - out) / 3
    return FieldTensor(out, complex("nan"), tuple(R))
