"""
A closed causal loop in the second family
=========================================

In the second family the vertical direction X3 is timelike, so a causal
curve can climb, swing out, and come back to where it started.  Here we
build such a loop from three constant controls, check it closes, and watch
the Lorentzian length grow with every extra lap.
"""

import math

import numpy as np

from heislorentz import oracle
from heislorentz.family_two import admissible_t2, periodic_plan
from heislorentz.group import Family

eps = 1.0

# Two lightlike legs: (1, 0, 1) for t1, then (0, -1, 1) until t2.  The
# second leg sinks in z because x > 2 eps turns the twist term negative.
plan = periodic_plan(eps, 6, 15)
print("waypoints q(t1), q(t2), q(t3):")
print(plan.waypoints)

# The third leg is the chord back to the identity; it is timelike, so it is
# the only leg that contributes length.
print("closing control", plan.third_control, "length", plan.lorentz_length, "=", math.sqrt(27))

# Closure by group-law composition is exact; RK4 agrees to rounding.
traj = oracle.integrate_control(eps, [0, 0, 0], plan.control)
print("RK4 endpoint", traj.endpoint)

# Laps: the loop can be repeated, and the length is additive, so there is
# no upper bound on the length of causal curves from the identity to itself.
for k in (1, 2, 4, 8, 16):
    tr = oracle.integrate_control(eps, [0, 0, 0], plan.control.repeat(k), steps_per_segment=20)
    print(f"{k:3d} laps: length {oracle.length_functional(tr, eps, Family.TWO):10.4f}")

# The construction needs t1 > 4 eps.  Below that the second leg never
# reaches the past cone of the identity, whatever t2 is.
for t1 in (3.0, 4.0, 4.5, 6.0, 10.0):
    try:
        print(f"t1 = {t1:4.1f}: smallest admissible t2 is about", round(admissible_t2(eps, t1, 1.0 + 1e-9), 4))
    except Exception as exc:
        print(f"t1 = {t1:4.1f}: {type(exc).__name__}")

# The same loop scales with eps: (6 eps, 15 eps) is admissible for every eps.
for e in (0.25, 0.5, 2.0):
    p = periodic_plan(e)
    print(f"eps = {e}: t2 = {p.t2}, closure {p.closure_residual:.1e}, length {p.lorentz_length:.6f}")
