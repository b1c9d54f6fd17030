"""
The eps -> 0 limit of the first family
======================================

As eps shrinks, the control cone of the first family flattens onto
{dz = 0} and the problem turns sub-Lorentzian.  Three things should
converge: the exponential maps (after transferring coordinates), the
attainable sets, and the spheres.  We measure each along eps = 1, 0.1, 0.01.
Pass an output directory to also write CSV tables of the spheres.
"""

import sys
from pathlib import Path

import numpy as np

from heislorentz import export
from heislorentz.family_one import boundary_height
from heislorentz.limit import (exp_convergence, indicator_convergence, membership_threshold,
                               sphere_samples, sphere_semicontinuity, sphere_upper_proxy)

eps_list = [1.0, 0.1, 0.01]

# Exponential maps: the error drops by about eps**2 per step.
for psi, c, t in [(0.5, 1.0, 1.0), (-1.0, 2.0, 2.5), (1.5, -0.3, 0.7)]:
    rep = exp_convergence(psi, c, t, eps_list)
    print(f"(psi, c, t) = ({psi}, {c}, {t}): errors", ["%.2e" % e for e in rep.errors])

# Attainable sets shrink to A0 = {x >= 0, 4|z| <= x**2 - y**2}.  A point just
# above the limit surface drops out at a computable eps*.
q = [1.0, 0.0, 0.3]
print("q =", q, "members along eps 1, 0.5, 0.1, 0.01:", indicator_convergence(q, [1, 0.5, 0.1, 0.01]).members)
print("   leaves A_eps below eps* =", membership_threshold(q))

# The boundary heights decrease to (x**2 - y**2)/4.
x = np.array([0.5, 1.0, 2.0, 5.0])
for e in (1.0, 0.1, 1e-3):
    print(f"eps = {e:6}: heights at y = 0:", np.round(boundary_height(e, x, 0 * x)[0], 6), "limit", x * x / 4)

# Spheres: every point of the limit sphere is approached (the proven
# direction).  The reverse distance is reported only as data.
for e in eps_list:
    print(f"eps = {e:5}: sup over S0 of dist to S_eps = {sphere_semicontinuity(1.0, e):.3e}, "
          f"reverse = {sphere_upper_proxy(1.0, e):.3e}")

if len(sys.argv) > 1:
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    for e in eps_list:
        s0, se = sphere_samples(1.0, e)
        with open(out / f"sphere_eps{e}.csv", "w") as fh:
            export.write_csv(fh, ["x0", "y0", "z0", "x", "y", "z"], np.hstack([s0, se]))
    print("wrote", sorted(p.name for p in out.glob("sphere_eps*.csv")))
