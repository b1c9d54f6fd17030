"""
Where does the second-family exponential map degenerate?
========================================================

The closed-form Jacobian of the second family factors as a sinh(theta)
prefactor times a function f(theta, tau).  The claim under test is that
conjugate points sit only on theta = 0 at tau = 2 pi n, i.e. at heights
z = 2 pi n eps**2 on the z-axis.  We check it with a finite-difference
Jacobian in Cartesian covector coordinates, which does not care about the
polar chart's degeneracy at theta = 0.
"""

import math

import numpy as np

from heislorentz import oracle
from heislorentz.family_two import chart2, conjugate_scan, exp2, first_zero_f
from heislorentz.group import Family

eps = 1.0
taus = np.linspace(0.05, 13.0, 1300)

# On theta = 0 the scan finds the predicted zeros at 2 pi and 4 pi.
# They are double zeros: the determinant touches zero without changing sign.
(rep0,) = conjugate_scan(eps, [0.0], taus)
print("theta = 0: fd zeros at tau =", np.round(rep0.tau_zeros, 3), "predicted", [2 * math.pi, 4 * math.pi])
print("           z there:", np.round(rep0.z_at_zeros, 4))

# Away from theta = 0 the first zero comes earlier, somewhere in (pi, 2 pi),
# and it is where f vanishes: tan(tau/2) = -(tau/2) sinh(theta)**2.
for rep in conjugate_scan(eps, [0.25, 0.5, 1.0, 2.0], taus):
    print(f"theta = {rep.theta:4.2f}: first fd zero {rep.tau_zeros[0]:.4f}, "
          f"root of f {first_zero_f(rep.theta):.4f}, z there {rep.z_at_zeros[0]:.4f}")

# So for theta != 0 the first conjugate point is not on the line
# z = 2 pi eps**2.  The RK4 oracle sees the same sign change.
theta = 1.0
tau_star = first_zero_f(theta)
t_star = tau_star * eps / math.cosh(theta)
ts = t_star + np.array([-0.02, -0.01, 0.01, 0.02])
fd = oracle.fd_jacobian(Family.TWO, eps, np.broadcast_to(chart2(eps, theta, 0.0), (4, 3)), ts, h_step=1e-4)
print("RK4 fd Jacobian around t* =", round(t_star, 5), ":", fd)
print("Exp there:", exp2(eps, theta, 0.0, t_star))
