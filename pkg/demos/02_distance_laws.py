"""
Distance laws of the static part
================================

Fit log-log slopes of the two static terms in the near and far zones.
"""

import numpy as np

from cpdyn import params as P
from cpdyn.checks import loglog_slope
from cpdyn.potential import term_cp_dispersion, term_resonant

p = P.SystemParams(mu_A=(1.0, 0.0, 0.0), k0=1.0, pol_B=P.TwoLevel(1.0, 2.0),
                   hbar_c=1.0, c=1.0)
along_z = lambda x: (0.0, 0.0, x)

near = np.geomspace(1e-3, 1e-2, 9)
far = np.geomspace(20, 100, 9)

cp_near = [term_cp_dispersion(p, along_z(x)) for x in near]
cp_far = [term_cp_dispersion(p, along_z(x)) for x in far]
print(f"dispersion term: near slope {loglog_slope(near, cp_near):.3f}, "
      f"far slope {loglog_slope(far, cp_far):.3f}")

# %%
# The resonant term oscillates in the far zone, so fit the envelope: the max
# over one half wavelength above each x.

xs = np.geomspace(20, 200, 9)
env = [max(abs(term_resonant(p, along_z(x + d))) for d in np.linspace(0, np.pi, 33))
       for x in xs]
print(f"resonant envelope: far slope {loglog_slope(xs, env):.3f}")
print(f"resonant: near slope "
      f"{loglog_slope(near, [term_resonant(p, along_z(x)) for x in near]):.3f}")
