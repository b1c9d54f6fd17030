"""Numerical comparisons for every formula that admits two readings.

Each ``Comparison`` evaluates all readings against an oracle that does not
depend on the choice being made (RK4 integration, finite differences,
group-law composition, or a brute-force scan) and names the adopted
reading.  ``run_all`` produces the full set; ``to_json`` serialises it.
"""

from dataclasses import asdict, dataclass, field
import json
import math
from typing import Dict

import numpy as np
from scipy.optimize import brentq

from . import family_one as f1
from . import family_two as f2
from . import limit
from . import oracle
from .group import Family, dynamics, group_inverse, lorentz_form


@dataclass
class Comparison:
    key: str
    topic: str
    metric: str
    errors: Dict[str, float]
    adopted: str
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def winner(self):
        return min(self.errors, key=lambda k: self.errors[k])

    @property
    def justified(self):
        """Adopted reading has the smallest oracle error, strictly below every other."""
        if len(self.errors) < 2 or not all(math.isfinite(v) for v in self.errors.values()):
            return False
        best = self.errors[self.adopted]
        return all(best < v for k, v in self.errors.items() if k != self.adopted)


def _rng(seed):
    return np.random.default_rng(seed)


def compare_xdot(seed=0):
    """Lemma on the causal shadow: is x' = u1 (the system) or x' = y?"""
    rng = _rng(seed)
    errs = {"x' = u1": 0.0, "x' = y": 0.0}
    for _ in range(5):
        segs = []
        for _ in range(4):
            u2, u3 = rng.uniform(-1, 1, 2)
            segs.append((np.array([math.hypot(u2, u3) + rng.uniform(0, 1), u2, u3]), rng.uniform(0.2, 1.0)))
        plan = _Plan(segs)
        traj = oracle.integrate_control(1.0, np.zeros(3), plan, 400)
        dt = np.diff(traj.times)
        x_u = np.sum(traj.controls[:, 0, 0] * dt)
        ys = traj.points[:, 1]
        x_y = np.sum(0.5 * (ys[1:] + ys[:-1]) * dt)
        x_end = traj.points[-1, 0]
        errs["x' = u1"] = max(errs["x' = u1"], abs(x_end - x_u))
        errs["x' = y"] = max(errs["x' = y"], abs(x_end - x_y))
    return Comparison("xdot", "first-family shadow lemma: horizontal velocity",
                      "max |x(T) - integral of reading| over 5 random causal plans (RK4)",
                      errs, "x' = u1")


class _Plan:
    def __init__(self, segments):
        self.segments = segments


def compare_zdot_family_one(eps=0.5, seed=1):
    """Vertical drift of the normal extremal: eps**2 h3 or eps h3**2."""
    rng = _rng(seed)
    theta = rng.uniform(-1, 1, 50)
    phi = rng.uniform(0, 2 * np.pi, 50)
    t = rng.uniform(0.1, 3, 50)
    h = f1.chart1(eps, theta, phi)
    # oracle: drive the control system with the maximising control along the covector flow
    n = 3000
    q = np.zeros(h.shape)
    dt = (t / n)[:, None]

    def field(q, s):
        return dynamics(q, oracle.extremal_control(1, eps, f1.vertical_flow1(eps, h, s)), eps)

    s = np.zeros_like(t)
    for _ in range(n):
        k1 = field(q, s)
        k2 = field(q + 0.5 * dt * k1, s + 0.5 * dt[:, 0])
        k3 = field(q + 0.5 * dt * k2, s + 0.5 * dt[:, 0])
        k4 = field(q + dt * k3, s + dt[:, 0])
        q = q + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s = s + dt[:, 0]
    errs = {}
    for variant, name in (("adopted", "eps^2 h3"), ("literal", "eps h3^2")):
        end, _ = oracle.extremal_endpoint(1, eps, h, t, steps=3000, variant=variant)
        errs[name] = float(np.max(np.abs(end - q)))
    return Comparison("zdot1", "first family: drift term of z' in the Hamiltonian system",
                      f"max endpoint gap to control-system integration with the maximising control, eps={eps}",
                      errs, "eps^2 h3")


def _printed_jacobian1(eps, theta, phi, t, hyperbolic):
    s = np.sinh(theta) * np.sin(phi)
    tau = s * t / eps
    first = tau * (np.sinh(tau) if hyperbolic else np.sin(tau))
    second = (2 - np.cosh(tau) + tau * np.sinh(tau)) / s**2
    return eps**4 / (np.sin(phi) ** 3 * np.sinh(theta) ** 2) * (first + second)


def compare_jacobian1(eps=1.0, seed=2):
    """Printed first-family Jacobian (sin or sinh reading) versus the derived closed form."""
    rng = _rng(seed)
    errs = {"printed tau sin tau": 0.0, "printed tau sinh tau": 0.0, "derived": 0.0}
    signs = []
    for _ in range(20):
        theta, phi, t = rng.uniform(0.2, 1.2), rng.uniform(0.2, np.pi - 0.2), rng.uniform(0.3, 3)
        fd = oracle.fd_jacobian(1, eps, f1.chart1(eps, theta, phi), t, endpoint="closed")
        fd *= oracle.chart_factor(1, eps, theta)
        cands = {
            "printed tau sin tau": _printed_jacobian1(eps, theta, phi, t, False),
            "printed tau sinh tau": _printed_jacobian1(eps, theta, phi, t, True),
            "derived": f1.jacobian1(eps, theta, phi, t),
        }
        for k, v in cands.items():
            errs[k] = max(errs[k], abs(v - fd) / abs(fd))
        signs.append(np.sign(fd))
    # small-t behaviour: the true J vanishes like t**2
    theta, phi = 1.0, np.pi / 2
    small = [oracle.fd_jacobian(1, eps, f1.chart1(eps, theta, phi), t, h_step=1e-6, endpoint="closed")
             * oracle.chart_factor(1, eps, theta) / t**2 for t in (1e-2, 5e-3)]
    extra = {"fd_J_over_t2_small_t": small, "eps_sinh_theta": eps * math.sinh(theta),
             "printed_tau0_value": float(eps**4 / (math.sinh(theta) ** 4))}
    return Comparison("jacobian1", "first family: Jacobian d(x,y,z)/d(t,theta,phi)",
                      "max relative error to the finite-difference Jacobian on 20 chart points",
                      {k: float(v) for k, v in errs.items()}, "derived",
                      note="both printed readings also miss the t**2 vanishing at t -> 0",
                      extra=extra)


def compare_sphere_slice(eps=1.0, r=1.5):
    """z = 0 slice of the sphere of radius r: x = sqrt(y**2 + z**2) or sqrt(y**2 + r**2)."""
    errs = {"x = sqrt(y^2 + z^2)": 0.0, "x = sqrt(y^2 + r^2)": 0.0}
    for y in np.linspace(-3, 3, 13):
        for name, x in (("x = sqrt(y^2 + z^2)", abs(y)), ("x = sqrt(y^2 + r^2)", math.hypot(y, r))):
            d = f1.distance1(eps, np.array([x, y, 0.0]))
            errs[name] = max(errs[name], abs((d if d is not None else 0.0) - r))
    return Comparison("sphere_slice", "first family: sphere of radius r on z = 0",
                      "max |distance1 - r| over 13 slice points of each reading", errs, "x = sqrt(y^2 + r^2)")


def compare_length_integrand(seed=3):
    """Second-family length integrand: u3^2 - u1^2 - u3^2 or u3^2 - u1^2 - u2^2."""
    rng = _rng(seed)
    u1, u2 = rng.uniform(-2, 2, (2, 200))
    u3 = np.hypot(u1, u2) + rng.uniform(0, 2, 200)
    u = np.stack([u1, u2, u3], -1)
    q = rng.uniform(-5, 5, (200, 3))
    speed = np.sqrt(-lorentz_form(dynamics(q, u, 0.7), q, 0.7, Family.TWO))
    lit = np.sqrt(np.maximum(u3**2 - u1**2 - u3**2, 0))
    fixed = np.sqrt(u3**2 - u1**2 - u2**2)
    errs = {"u3^2 - u1^2 - u3^2": float(np.max(np.abs(lit - speed))),
            "u3^2 - u1^2 - u2^2": float(np.max(np.abs(fixed - speed)))}
    return Comparison("length2", "second family: integrand of the length functional",
                      "max |sqrt(reading) - sqrt(-g(q'))| on 200 random causal controls", errs,
                      "u3^2 - u1^2 - u2^2", note="negative radicands of the literal reading clipped to 0")


def compare_pmp_constraint(eps=1.0):
    """Covector constraint for the second-family boundary surface."""
    h3 = -np.linspace(1.05, 4, 12) / eps
    a = np.linspace(0, 2 * np.pi, 9)
    A, H = np.meshgrid(a, h3, indexing="ij")
    rho = np.sqrt((eps * H) ** 2 - 1)
    fixed = np.stack([rho * np.cos(A), rho * np.sin(A), H], -1)
    # literal: h2 + h2**2 = eps**2 h3**2 - 1 solved for h2 >= 0, same h1
    h2 = 0.5 * (-1 + np.sqrt(1 + 4 * ((eps * H) ** 2 - 1)))
    lit = np.stack([rho * np.cos(A), h2, H], -1)
    errs = {}
    for name, h in (("h2 + h2^2 - eps^2 h3^2 = -1", lit), ("h1^2 + h2^2 - eps^2 h3^2 = -1", fixed)):
        errs[name] = float(np.max(np.abs(oracle.hamiltonian(2, eps, h) + 0.5)))
    traj = oracle.integrate_extremal(2, eps, fixed.reshape(-1, 3), 1.0, steps=1000)
    length = oracle.length_functional(traj, eps, 2)
    return Comparison("pmp_constraint", "second family: covector level defining the PMP surface",
                      "max |H + 1/2| on 108 covectors built from each reading (arclength level)",
                      errs, "h1^2 + h2^2 - eps^2 h3^2 = -1",
                      note="literal covectors give spacelike controls, so no length can be measured",
                      extra={"adopted_rk4_length_error": float(np.max(np.abs(length - 1.0)))})


def compare_pmp_z_tail(eps=1.0):
    """Last term of z on the PMP surface: -eps^2 h3 or -eps^2 h3^2."""
    ang = np.linspace(0, 2 * np.pi, 9)
    h3 = -np.linspace(1.0, 4.0, 10) / eps
    errs = {}
    A, H = np.meshgrid(ang, h3, indexing="ij")
    rho = np.sqrt((eps * H) ** 2 - 1)
    h = np.stack([rho * np.cos(A), rho * np.sin(A), H], -1)
    end, _ = oracle.extremal_endpoint(2, eps, h, 1.0)
    for variant, name in (("adopted", "-eps^2 h3"), ("literal", "-eps^2 h3^2")):
        pts = f2.pmp_surface2(eps, ang, h3, variant).points
        errs[name] = float(np.max(np.abs(pts - end)))
    return Comparison("pmp_z_tail", "second family: z-coordinate of the PMP surface",
                      "max |surface point - RK4 endpoint at t = 1|", errs, "-eps^2 h3")


def compare_conjugate_claim(eps=1.0, theta=1.0):
    """First conjugate point along a theta != 0 extremal: claimed 2 pi or first zero of f."""
    ch = math.cosh(theta)
    h0 = f2.chart2(eps, theta, 0.3)

    def fd(tau):
        return oracle.fd_jacobian(2, eps, h0, tau * eps / ch, endpoint="closed")

    grid = np.linspace(0.5, 2 * math.pi - 0.05, 200)
    vals = fd(grid)
    i = int(np.argmax(np.sign(vals) != np.sign(vals[0])))
    tau_fd = brentq(fd, grid[i - 1], grid[i], xtol=1e-12)
    claimed, exact = 2 * math.pi, f2.first_zero_f(theta)
    z_fd = float(f2.exp2(eps, theta, 0.3, tau_fd * eps / ch)[2])
    errs = {"claimed tau = 2 pi n": abs(claimed - tau_fd), "first zero of f": abs(exact - tau_fd)}
    return Comparison("conj_preim", "second family: location of the first conjugate point",
                      f"|tau - first sign change of the Cartesian fd Jacobian| at theta={theta}",
                      errs, "first zero of f",
                      note="the printed f is right; only the stated zero set is wrong off theta = 0",
                      extra={"tau_fd": tau_fd, "z_at_fd_zero": z_fd, "claimed_z": 2 * math.pi * eps**2,
                             "x_y_at_fd_zero": f2.exp2(eps, theta, 0.3, tau_fd * eps / ch)[:2].tolist()})


def compare_z_t2(seed=4):
    """Height after the two lightlike chords: eps t2 + ... or eps t1 + ..."""
    rng = _rng(seed)
    errs = {"eps t2 + (eps - t1/2)(t2 - t1)": 0.0, "eps t1 + (eps - t1/2)(t2 - t1)": 0.0}
    for _ in range(10):
        eps = rng.uniform(0.3, 2)
        t1 = rng.uniform(0.5, 8)
        t2 = t1 + rng.uniform(0.5, 8)
        plan = _Plan([(np.array([1.0, 0, 1]), t1), (np.array([0, -1.0, 1]), t2 - t1)])
        z = oracle.integrate_control(eps, np.zeros(3), plan, 500).points[-1, 2]
        errs["eps t2 + (eps - t1/2)(t2 - t1)"] = max(errs["eps t2 + (eps - t1/2)(t2 - t1)"],
                                                     abs(eps * t2 + (eps - t1 / 2) * (t2 - t1) - z))
        errs["eps t1 + (eps - t1/2)(t2 - t1)"] = max(errs["eps t1 + (eps - t1/2)(t2 - t1)"],
                                                     abs(eps * t1 + (eps - t1 / 2) * (t2 - t1) - z))
    return Comparison("z_t2", "second family: z(t2) of the periodic construction",
                      "max |formula - RK4| over 10 random (eps, t1, t2)", errs,
                      "eps t1 + (eps - t1/2)(t2 - t1)")


def compare_t1_threshold(eps=1.0):
    """Which t1 admit a closing chord for some t2: t1 > 2 eps or t1 > 4 eps."""
    t1s = np.linspace(0.5 * eps, 8 * eps, 31)
    t2_factors = np.geomspace(1.001, 1e4, 400)
    truth = []
    for t1 in t1s:
        ok = False
        for k in t2_factors:
            back = group_inverse(f2.excursion_point(eps, t1, t1 * k - t1))
            if back[2] > eps * math.hypot(back[0], back[1]):
                ok = True
                break
        truth.append(ok)
    truth = np.array(truth)
    errs = {"t1 > 2 eps": float(np.mean((t1s > 2 * eps) != truth)),
            "t1 > 4 eps": float(np.mean((t1s > 4 * eps) != truth))}
    return Comparison("t1_threshold", "second family: condition on t1 for the periodic loop",
                      "misclassification rate against a brute-force scan over t2 up to 1e4 t1", errs,
                      "t1 > 4 eps")


def compare_exp0_z(seed=5, eps=1e-4):
    """Limit z-formula: (sinh ct - ct)/(2c^2) or (sinh ct + ct)/(2c^2)."""
    rng = _rng(seed)
    psi, c, t = rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50), rng.uniform(0.1, 3, 50)
    theta, phi = limit.transfer(eps, psi, c)
    ref = f1.exp1(eps, theta, phi, t)[:, 2]
    u = c * t
    errs = {"sinh ct - ct": float(np.max(np.abs((np.sinh(u) - u) / (2 * c * c) - ref))),
            "sinh ct + ct": float(np.max(np.abs((np.sinh(u) + u) / (2 * c * c) - ref)))}
    return Comparison("exp0_z", "limit problem: z-coordinate of the exponential map",
                      f"max |z - z of the first family at eps={eps}| on 50 random (psi, c, t)",
                      errs, "sinh ct - ct")


def compare_limit_sphere_label(r=1.0, eps=0.01):
    """Is {Exp(psi, c, r)} the eps-sphere of radius 0 or the limit sphere S0(r)?"""
    s0, _ = limit.sphere_samples(r, eps, 20, 20)
    zero_sphere_gap = 0.0
    for q in s0:
        if q[0] > abs(q[1]):
            zero_sphere_gap = max(zero_sphere_gap, abs(abs(q[2]) - f1.boundary_height(eps, q[0], q[1])[0]))
    errs = {"S_eps(0)": zero_sphere_gap, "S_0(r)": limit.sphere_semicontinuity(r, eps, 20, 20)}
    return Comparison("sphere0_label", "limit problem: label of the sphere parametrised by (psi, c)",
                      f"S_eps(0): max distance in z to the boundary of A_eps; "
                      f"S_0(r): one-sided grid distance to S_eps(r); eps={eps}",
                      errs, "S_0(r)")


def compare_past_set(eps=1.0, seed=6):
    """Shadow condition of the causal past: x <= y or x <= -|y|."""
    rng = _rng(seed)
    pts = rng.uniform(-3, 3, (300, 3))
    s = rng.uniform(0.1, 3, 30)
    pts = np.concatenate([pts, np.stack([s, s, 0 * s], -1), np.stack([-s, s, 0 * s], -1)])
    truth = np.array([f1.attain_region1(eps, group_inverse(q)).member for q in pts])
    wrong = {"x <= y": 0, "x <= -|y|": 0}
    for q, t in zip(pts, truth):
        x, y, z = q
        for name, shadow in (("x <= y", x <= y), ("x <= -|y|", x <= -abs(y))):
            arg = (x * x - y * y) / (2 * eps**2) + 1
            if shadow and arg >= 1:
                tau = math.acosh(arg)
                pred = abs(z) <= 0.5 * eps**2 * (math.sinh(tau) + tau) + 1e-12
            else:
                pred = False
            wrong[name] += int(pred != t)
    errs = {k: v / len(pts) for k, v in wrong.items()}
    return Comparison("past_set", "first family: causal past of the identity",
                      "misclassification rate against membership of q^-1 in the future set "
                      "(300 random points plus the rays x = y and x = -y in z = 0)",
                      errs, "x <= -|y|")


def compare_invariance_identity(eps=1.0):
    """In the invariance proof: v1 = sqrt(v1^2 + v2^2) or v1 = sqrt(v2^2 + v3^2)."""
    samples = f1.lightlike_surface1(eps, np.linspace(-2, 2, 9), np.linspace(0.1, 4, 9))
    pts = samples.points.reshape(-1, 3)
    x, y = pts[:, 0], pts[:, 1]
    tau = f1._shadow_tau(eps, x, y)
    k = (np.cosh(tau) + 1) / np.sinh(tau)
    v1, v2, v3 = x * k + y, y * k + x, 2 * eps * np.ones_like(x)
    scale = np.maximum(1, np.abs(v1))
    errs = {"v1 = sqrt(v1^2 + v2^2)": float(np.max(np.abs(v1 - np.hypot(v1, v2)) / scale)),
            "v1 = sqrt(v2^2 + v3^2)": float(np.max(np.abs(v1 - np.hypot(v2, v3)) / scale))}
    return Comparison("invar_identity", "first family: identity closing the invariance argument",
                      "max relative residual on 81 boundary samples", errs, "v1 = sqrt(v2^2 + v3^2)")


OPEN_QUESTIONS = {
    "xdot": compare_xdot,
    "zdot1": compare_zdot_family_one,
    "jacobian1": compare_jacobian1,
    "sphere_slice": compare_sphere_slice,
    "length2": compare_length_integrand,
    "pmp_constraint": compare_pmp_constraint,
    "pmp_z_tail": compare_pmp_z_tail,
    "conj_preim": compare_conjugate_claim,
    "z_t2": compare_z_t2,
    "t1_threshold": compare_t1_threshold,
    "exp0_z": compare_exp0_z,
    "sphere0_label": compare_limit_sphere_label,
    "past_set": compare_past_set,
    "invar_identity": compare_invariance_identity,
}


def run_all():
    return [fn() for fn in OPEN_QUESTIONS.values()]


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def to_json(comparisons):
    rows = []
    for c in comparisons:
        d = _clean(asdict(c))
        d["winner"] = c.winner
        d["justified"] = c.justified
        rows.append(d)
    return json.dumps(rows, indent=2, allow_nan=True)
