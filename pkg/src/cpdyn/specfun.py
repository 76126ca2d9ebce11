"""Scalar special functions: the time window F_t, the step function and the
transverse angular kernel."""

import numpy as np
from scipy.special import spherical_jn

# below this |x t| the closed form of F_t loses digits to cancellation
SERIES_THRESHOLD = 1e-4


def f_t(x, t):
    """F_t(x) = integral of exp(i x s) over s in [0, t].

    Vectorized over x and t. Returns complex.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("f_t needs t >= 0")
    x, t = np.broadcast_arrays(x, t)
    z = x * t
    small = np.abs(z) < SERIES_THRESHOLD
    out = np.empty(z.shape, dtype=complex)
    zs = z[small]
    out[small] = t[small] * (1 + 1j * zs / 2 - zs**2 / 6 - 1j * zs**3 / 24)
    big = ~small
    # (e^{iz} - 1)/(ix) = t * (e^{iz} - 1)/(iz), expm1 keeps the small end sharp
    zb = z[big]
    out[big] = t[big] * (np.expm1(1j * zb) / (1j * zb))
    if out.ndim == 0:
        return complex(out)
    return out


def theta(arg):
    """Heaviside step with theta(0) = 0."""
    a = np.asarray(arg)
    out = (a > 0).astype(float)
    if out.ndim == 0:
        return float(out)
    return out


def _kernel_coeffs(x):
    """Coefficients (a, b) with K = a*delta + b*RR.

    a = j0 - j1/x, b = j2. Small x handled by series.
    """
    x = np.asarray(x, dtype=float)
    a = np.empty_like(x)
    b = np.empty_like(x)
    small = x < 1e-2
    xs = x[small]
    x2 = xs * xs
    # j0 - j1/x = 2/3 - 2 x^2/15 + x^4/140 ...
    a[small] = 2.0 / 3 - 2 * x2 / 15 + x2 * x2 / 140
    # j2 = x^2/15 - x^4/210 + ...
    b[small] = x2 / 15 - x2 * x2 / 210
    xb = x[~small]
    a[~small] = spherical_jn(0, xb) - spherical_jn(1, xb) / xb
    b[~small] = spherical_jn(2, xb)
    return a, b


def transverse_angular_kernel(xarg, rhat):
    """Angular average of (delta - k k) exp(i k.R) over directions of k.

    ``xarg`` = |k||R| (scalar or array), ``rhat`` a unit 3-vector.
    Returns a real symmetric 3x3 tensor, or an (n, 3, 3) stack for array input.
    """
    xarg = np.asarray(xarg, dtype=float)
    if np.any(xarg < 0):
        raise ValueError("kernel argument must be >= 0")
    rhat = np.asarray(rhat, dtype=float)
    a, b = _kernel_coeffs(np.atleast_1d(xarg))
    out = a[:, None, None] * np.eye(3) + b[:, None, None] * np.outer(rhat, rhat)
    if xarg.ndim == 0:
        return out[0]
    return out
