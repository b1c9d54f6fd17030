"""Second family: cone u3 >= sqrt(u1**2 + u2**2), form w1**2 + w2**2 - w3**2/eps**2.

Here the vertical direction is timelike, so there are closed causal loops and
no length maximizers.  Normal extremals use the chart

    h1 = sinh(theta) cos(phi),  h2 = sinh(theta) sin(phi),  eps*h3 = -cosh(theta)

of {H = -1/2}; along them tau = h3*t is negative.
"""

from dataclasses import dataclass, field
import math
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from . import _special as sp
from .errors import InvalidParameter, NotAdmissible, NotCausal, PlanFailure
from .family_one import GridSamples
from .group import Family, as_points, check_eps, cone_contains, group_inverse, group_mul


def chart2(eps, theta, phi):
    eps = check_eps(eps)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    sh = np.sinh(theta)
    return np.stack([sh * np.cos(phi), sh * np.sin(phi), -np.cosh(theta) / eps], axis=-1)


def covector_to_chart2(eps, h):
    """Inverse of ``chart2`` with theta >= 0, phi in [0, 2*pi)."""
    check_eps(eps)
    h = as_points(h)
    theta = np.arcsinh(np.hypot(h[..., 0], h[..., 1]))
    phi = np.mod(np.arctan2(h[..., 1], h[..., 0]), 2 * np.pi)
    return theta, phi


def hamiltonian2(eps, h):
    eps = check_eps(eps)
    h = as_points(h)
    return 0.5 * (h[..., 0] ** 2 + h[..., 1] ** 2 - eps**2 * h[..., 2] ** 2)


def vertical_flow2(eps, h0, t):
    """Rotation of (h1, h2) by the angle tau = h3*t."""
    check_eps(eps)
    h0 = as_points(h0)
    tau = h0[..., 2] * np.asarray(t, float)
    c, s = np.cos(tau), np.sin(tau)
    h1 = h0[..., 0] * c - h0[..., 1] * s
    h2 = h0[..., 1] * c + h0[..., 0] * s
    return np.stack([h1, h2, np.broadcast_to(h0[..., 2], h1.shape)], axis=-1)


def exp2_covector(eps, h0, t):
    """Endpoint of the normal extremal with initial covector h0 after time t.

    z = t**2 (h1**2 + h2**2) (tau - sin tau)/(2 tau**2) - eps**2 tau, which on
    the level {H = -1/2} is ((eps h3)**2 - 1)(tau - sin tau)/(2 h3**2) - eps**2 tau.
    """
    eps = check_eps(eps)
    h0 = as_points(h0)
    t = np.asarray(t, float)
    h1, h2, h3 = h0[..., 0], h0[..., 1], h0[..., 2]
    tau = h3 * t
    snc = sp.sinc(tau)
    cmo = sp.cos_minus_one_over(tau)
    x = t * (h1 * snc + h2 * cmo)
    y = t * (h2 * snc - h1 * cmo)
    z = 0.5 * t * t * (h1 * h1 + h2 * h2) * sp.id_minus_sin_over_sq(tau) - eps**2 * tau
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def exp2(eps, theta, phi, t):
    return exp2_covector(eps, chart2(eps, theta, phi), t)


def abnormal2(eps, beta, t):
    """Lightlike extremal with covector (cos beta, sin beta, -1/eps) on {H = 0}.

    Its z-coordinate is -(eps**2/2)(tau + sin tau) with tau = -t/eps.
    """
    eps = check_eps(eps)
    beta = np.asarray(beta, float)
    h0 = np.stack(np.broadcast_arrays(np.cos(beta), np.sin(beta), np.full_like(beta, -1.0 / eps)), axis=-1)
    return exp2_covector(eps, h0, t)


def pmp_surface2(eps, angles, h3_values, variant="adopted"):
    """Endpoints at time 1 of all normal extremals, grid over (angle, h3).

    The covector is (rho cos a, rho sin a, h3) with rho = sqrt((eps h3)**2 - 1),
    so every h3 must satisfy eps*h3 <= -1.  ``variant="literal"`` swaps the
    last z-term -eps**2 h3 for -eps**2 h3**2, the alternative reading kept for
    the discrepancy report.
    """
    eps = check_eps(eps)
    angles = np.asarray(angles, float)
    h3v = np.asarray(h3_values, float)
    if np.any(eps * h3v > -1.0):
        raise InvalidParameter("pmp_surface2 needs eps*h3 <= -1 on every sample")
    if variant not in ("adopted", "literal"):
        raise InvalidParameter(f"unknown variant {variant!r}")
    A, H = np.meshgrid(angles, h3v, indexing="ij")
    rho = np.sqrt((eps * H) ** 2 - 1.0)
    h = np.stack([rho * np.cos(A), rho * np.sin(A), H], axis=-1)
    pts = exp2_covector(eps, h, 1.0)
    if variant == "literal":
        pts[..., 2] += eps**2 * H - eps**2 * H * H
    return GridSamples(angles, h3v, pts, labels=("angle", "h3"))


# -- conjugate points ----------------------------------------------------------------

def jacobian2(eps, theta, tau):
    """The printed pair (J, f):  J = -eps**4 sinh/cosh**3 f,
    f = 2(1 - cos tau)/cosh**2 + tau sin tau tanh**2."""
    eps = check_eps(eps)
    theta = np.asarray(theta, float)
    tau = np.asarray(tau, float)
    ch = np.cosh(theta)
    f = 2.0 * (1.0 - np.cos(tau)) / ch**2 + tau * np.sin(tau) * np.tanh(theta) ** 2
    J = -eps**4 * np.sinh(theta) / ch**3 * f
    if J.ndim == 0:
        return float(J), float(f)
    return J, f


def first_conjugate_time2(eps, theta):
    """The claimed first conjugate time 2*pi/|h3| = 2*pi*eps/cosh(theta)."""
    eps = check_eps(eps)
    return 2.0 * math.pi * eps / math.cosh(theta)


def first_zero_f(theta):
    """Smallest |tau| > 0 with f(theta, tau) = 0.

    f = 4 sin(s)(sin s + s cos s sinh(theta)**2)/cosh(theta)**2 with s = tau/2,
    so for theta != 0 the first zero solves tan s = -s sinh(theta)**2 on
    (pi/2, pi); at theta = 0 it is the double zero 2*pi.
    """
    k = math.sinh(theta) ** 2
    if k == 0.0:
        return 2.0 * math.pi
    s = brentq(lambda s: math.sin(s) + s * math.cos(s) * k, 0.5 * math.pi, math.pi, xtol=1e-15)
    return 2.0 * s


def first_conjugate_time2_exact(eps, theta):
    """First zero of the Jacobian along Exp(theta, ., t), converted to time."""
    eps = check_eps(eps)
    return first_zero_f(theta) * eps / math.cosh(theta)


@dataclass
class ConjugateReport:
    """Zeros of the Jacobian along one theta, in |tau|.

    ``tau_zeros`` come from the Cartesian finite-difference Jacobian,
    ``f_zeros`` from the printed f; ``predicted`` lists (n, 2*pi*n*eps**2)
    for every 2*pi*n inside the scanned range.  ``z_at_zeros`` holds the
    z-coordinate of Exp at each fd zero, to compare with the prediction.
    """

    theta: float
    tau_zeros: List[float]
    f_zeros: List[float]
    predicted: List[Tuple[int, float]]
    z_at_zeros: List[float] = field(default_factory=list)

    @property
    def agrees_with_prediction(self):
        want = [2 * math.pi * n for n, _ in self.predicted]
        return len(want) == len(self.tau_zeros) and all(
            abs(a - b) < 1e-2 for a, b in zip(self.tau_zeros, want))


def _grid_zeros(taus, vals, touch_rel=1e-3):
    """Sign changes (linear interpolation) plus near-zero local minima of |vals|."""
    zeros = []
    scale = float(np.max(np.abs(vals))) or 1.0
    for i in range(len(vals) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            zeros.append(float(taus[i]))
        elif a * b < 0:
            zeros.append(float(taus[i] - a * (taus[i + 1] - taus[i]) / (b - a)))
    mag = np.abs(vals)
    for i in range(1, len(vals) - 1):
        if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < touch_rel * scale:
            if vals[i - 1] * vals[i + 1] > 0 and not any(abs(taus[i] - z) < 2 * abs(taus[1] - taus[0]) for z in zeros):
                zeros.append(float(taus[i]))
    return sorted(zeros)


def conjugate_scan(eps, thetas, taus, endpoint="closed", h_step=1e-5):
    """Scan the Jacobian over |tau| for each theta; one ConjugateReport per theta.

    The finite-difference Jacobian is taken in Cartesian covector coordinates
    (see ``oracle.fd_jacobian``), which stay regular at theta = 0.
    """
    from .oracle import fd_jacobian

    eps = check_eps(eps)
    thetas = np.atleast_1d(np.asarray(thetas, float))
    taus = np.asarray(taus, float)
    if taus.size < 8 or thetas.size < 1:
        raise InvalidParameter("conjugate_scan needs at least 8 tau samples")
    if np.any(taus <= 0) or np.any(np.diff(taus) <= 0):
        raise InvalidParameter("tau samples must be positive and increasing (they are |tau|)")
    reports = []
    for theta in thetas:
        ch = math.cosh(theta)
        h0 = chart2(eps, theta, 0.0)
        ts = taus * eps / ch
        fd = fd_jacobian(Family.TWO, eps, np.broadcast_to(h0, ts.shape + (3,)), ts, h_step, endpoint)
        _, f = jacobian2(eps, theta, -taus)
        tz = _grid_zeros(taus, fd)
        fz = _grid_zeros(taus, f)
        z_at = [float(exp2(eps, theta, 0.0, tz_ * eps / ch)[2]) for tz_ in tz]
        n_max = int(taus[-1] // (2 * math.pi))
        predicted = [(n, 2 * math.pi * n * eps**2) for n in range(1, n_max + 1) if 2 * math.pi * n >= taus[0]]
        reports.append(ConjugateReport(float(theta), tz, fz, predicted, z_at))
    return reports


# -- piecewise-constant plans ---------------------------------------------------------

@dataclass
class PiecewiseControl:
    """Consecutive constant controls; every control lies in the second cone."""

    segments: List[Tuple[np.ndarray, float]]

    def __post_init__(self):
        clean = []
        for u, d in self.segments:
            u = np.asarray(u, float)
            if u.shape != (3,) or not np.all(np.isfinite(u)):
                raise InvalidParameter("controls must be finite 3-vectors")
            if not d > 0:
                raise InvalidParameter("segment durations must be positive")
            if not cone_contains(u, Family.TWO, rtol=1e-12):
                raise NotCausal(f"control {u} is outside the cone u3 >= |(u1, u2)|")
            clean.append((u, float(d)))
        self.segments = clean

    @property
    def total_time(self):
        return sum(d for _, d in self.segments)

    def then(self, other):
        return PiecewiseControl(self.segments + other.segments)

    def repeat(self, k):
        if k < 1:
            raise InvalidParameter("repeat count must be positive")
        return PiecewiseControl(self.segments * int(k))


def chord(eps, u, duration=1.0):
    """Group element reached from the identity by a constant control."""
    u = np.asarray(u, float)
    return duration * np.array([u[0], u[1], eps * u[2]])


def compose(eps, plan, start=None):
    """Exact endpoint of ``plan`` by multiplying its chords."""
    eps = check_eps(eps)
    q = np.zeros(3) if start is None else as_points(start).astype(float)
    for u, d in plan.segments:
        q = group_mul(q, chord(eps, u, d))
    return q


@dataclass
class PeriodicPlan:
    """Closed causal loop: two lightlike chords, then one timelike chord of unit duration."""

    eps: float
    t1: float
    t2: float
    third_control: np.ndarray
    t3: float
    waypoints: np.ndarray  # rows q(t1), q(t2), q(t3)
    lorentz_length: float

    @property
    def control(self):
        return PiecewiseControl([
            (np.array([1.0, 0.0, 1.0]), self.t1),
            (np.array([0.0, -1.0, 1.0]), self.t2 - self.t1),
            (self.third_control, self.t3 - self.t2),
        ])

    @property
    def closure_residual(self):
        return float(np.max(np.abs(self.waypoints[-1])))


def excursion_point(eps, a, b):
    """Endpoint of (1, 0, 1) for time a followed by (0, -1, 1) for time b."""
    return np.array([a, -b, eps * a + (eps - 0.5 * a) * b]) + 0.0  # + 0.0 turns -0.0 into 0.0


def _in_chord_cone(eps, q, strict):
    r = eps * math.hypot(q[0], q[1])
    return q[2] > r if strict else q[2] >= r


def periodic_plan(eps, t1=None, t2=None):
    """Construct the loop; defaults (t1, t2) = (6 eps, 15 eps).

    NotAdmissible when q(t2) is not strictly inside {z <= -eps sqrt(x**2 + y**2)},
    because then no causal chord leads back to the identity.
    """
    eps = check_eps(eps)
    t1 = 6.0 * eps if t1 is None else float(t1)
    t2 = 15.0 * eps if t2 is None else float(t2)
    if not 0 < t1 < t2:
        raise InvalidParameter("need 0 < t1 < t2")
    q1 = excursion_point(eps, t1, 0.0)
    q2 = excursion_point(eps, t1, t2 - t1)
    back = group_inverse(q2)
    if not _in_chord_cone(eps, back, strict=True):
        raise NotAdmissible(
            f"q(t2) = {q2.tolist()} is not strictly inside z <= -eps*sqrt(x^2+y^2); "
            f"this needs t1 > 4 eps and t2 large enough")
    u = np.array([back[0], back[1], back[2] / eps])
    q3 = group_mul(q2, chord(eps, u))
    length = math.sqrt(u[2] ** 2 - u[0] ** 2 - u[1] ** 2)
    return PeriodicPlan(eps, t1, t2, u, t2 + 1.0, np.array([q1, q2, q3]), length)


def admissible_t2(eps, t1, margin=1.125):
    """t1 + margin * s*, where s* = t2 - t1 is where q(t2) meets the cone boundary.

    With a = t1/2 - eps the boundary condition eps*sqrt(t1**2 + s**2) = a*s - eps*t1
    has the single positive root s* = 2 a eps t1/(a**2 - eps**2), which exists
    only for t1 > 4 eps.  margin = 1.125 reproduces (6 eps, 15 eps).
    """
    eps = check_eps(eps)
    a = 0.5 * t1 - eps
    if a <= eps:
        raise NotAdmissible(f"t1 = {t1} <= 4*eps: the second chord never enters the past cone")
    if margin <= 1.0:
        raise InvalidParameter("margin must exceed 1")
    s_star = 2.0 * a * eps * t1 / (a * a - eps * eps)
    return t1 + margin * s_star


def reach_plan(eps, q1, max_doublings=80, tol=1e-8):
    """An admissible plan from the identity to q1.

    Points in the chord cone {z >= eps*|(x, y)|} get a single chord.  Other
    targets first take an excursion (1, 0, 1) for a = 6 eps + max(0, x1),
    then (0, -1, 1) for a duration b doubled until the rest is a causal chord.
    """
    eps = check_eps(eps)
    q1 = as_points(q1).astype(float)
    if not np.all(np.isfinite(q1)):
        raise InvalidParameter("target must be finite")
    if _in_chord_cone(eps, q1, strict=False):
        plan = PiecewiseControl([(np.array([q1[0], q1[1], q1[2] / eps]), 1.0)])
    else:
        a = 6.0 * eps + max(0.0, q1[0])
        b = 1.0
        for _ in range(max_doublings):
            rest = group_mul(group_inverse(excursion_point(eps, a, b)), q1)
            if _in_chord_cone(eps, rest, strict=True):
                break
            b *= 2.0
        else:
            raise PlanFailure("no excursion length found", {"a": a, "b": b, "target": q1.tolist()})
        plan = PiecewiseControl([
            (np.array([1.0, 0.0, 1.0]), a),
            (np.array([0.0, -1.0, 1.0]), b),
            (np.array([rest[0], rest[1], rest[2] / eps]), 1.0),
        ])
    miss = float(np.max(np.abs(compose(eps, plan) - q1)))
    if miss > tol * max(1.0, float(np.max(np.abs(q1)))):
        raise PlanFailure("composed plan misses the target", {"residual": miss})
    return plan
