"""Left-invariant Lorentzian problems on the Heisenberg group.

Two families of structures (``family_one``, ``family_two``), their eps -> 0
limit (``limit``), brute-force validators (``oracle``) and a CLI.
"""

from .errors import (ChartSingular, HeisenbergError, IllConditioned, InvalidParameter, NoConvergence,
                     NotAdmissible, NotCausal, OutsideCausalShadow, PlanFailure)
from .family_one import (Direction, SphereSpec, attain_region1, attain_translated, boundary_height,
                         distance1, exp1, hamiltonian1, invert_exp1, jacobian1, lightlike_surface1,
                         sphere1, vertical_flow1)
from .family_two import (PeriodicPlan, PiecewiseControl, abnormal2, conjugate_scan, exp2,
                         first_conjugate_time2, hamiltonian2, jacobian2, periodic_plan, pmp_surface2,
                         reach_plan, vertical_flow2)
from .group import (Family, Regime, classify_commutant, cone_contains, dynamics, group_inverse,
                    group_mul, lorentz_form)
from .limit import (ConvergenceReport, attain0, cone_indicator, exp0, exp_convergence,
                    indicator_convergence, sphere_semicontinuity, transfer)
from .oracle import Trajectory, fd_jacobian, integrate_control, integrate_extremal, length_functional
from .regions import RegionVerdict, Status

__version__ = "0.1.0"
