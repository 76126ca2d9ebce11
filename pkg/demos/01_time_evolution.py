"""
Switching on the interaction
============================

An excited atom A and a ground-state atom B start uncoupled. Nothing happens
at B until light has had time to cross the gap, then the energy rings and
settles onto its static value.
"""

import numpy as np

from cpdyn import params as P
from cpdyn.potential import potential_static, potential_total

# reduced units throughout: k0 = 1, hbar c = c = 1
p = P.SystemParams(mu_A=(1.0, 0.0, 0.0), k0=1.0, pol_B=P.TwoLevel(1.0, 2.0),
                   hbar_c=1.0, c=1.0)
R = np.array([0.0, 0.0, 2.0])

# Before t = R/c every term is exactly zero.
for t in (0.0, 1.0, 1.99):
    print(f"t = {t:5.2f}  total = {potential_total(p, R, t).total}")

# %%
# Just after the wavefront arrives the dynamic term dominates. Very close to
# the front the integrals become singular, so the library refuses a thin
# shell (relative width 1e-3 by default).

static = potential_static(p, R)
print(f"\nstatic value {static:.6f}")
print("    t       dynamic          total      total/static")
for t in (2.01, 2.1, 2.5, 3, 4, 6, 10, 20, 50):
    b = potential_total(p, R, t)
    print(f"{t:6.2f}  {b.dynamic:+.6e}  {b.total:+.6e}  {b.total / static:8.4f}")

# %%
# The breakdown carries reduced values too, plus a quadrature error budget.

b = potential_total(p, R, 4.0)
print()
print(b.reduced, f"err_est={b.err_est:.1e}")
