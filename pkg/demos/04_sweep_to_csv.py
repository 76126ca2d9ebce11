"""
A sweep in physical units
=========================

Same engine, Gaussian units: a sodium-like transition (k0 = 1.07e5 /cm) and
a polarizable partner. Writes plot-ready CSV through the command-line layer.
"""

import os
import subprocess
import sys
import tempfile

cfg = """
atomA.mu = 2.5e-18, 0, 0
atomA.k0 = 1.07e5
atomB.model = two_level
atomB.mu = 3e-18
atomB.kB = 2.3e5
grid.R.min = 5e-6
grid.R.max = 5e-5
grid.R.count = 4
grid.t.min = 1e-16
grid.t.max = 1e-14
grid.t.count = 5
"""

with tempfile.TemporaryDirectory() as d:
    path = os.path.join(d, "run.cfg")
    with open(path, "w") as fh:
        fh.write(cfg)
    out = subprocess.run([sys.executable, "-m", "cpdyn", "sweep", "--config", path],
                         capture_output=True, text=True)
print(out.stdout)
print("exit", out.returncode)
