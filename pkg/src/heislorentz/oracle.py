"""Brute-force validators: fixed-step RK4, finite-difference Jacobians, length functional.

Nothing here uses the closed-form exponential maps except ``fd_jacobian`` with
``endpoint="closed"``, which differentiates them numerically (still
independent of the analytic Jacobian formulas).
"""

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from .errors import IllConditioned, InvalidParameter, NotCausal
from .group import Family, as_points, check_eps, dynamics, group_mul

STEPS_PER_UNIT_TIME = 1000


@dataclass
class Trajectory:
    """Sampled curve.

    ``times`` has shape (n, *batch), ``points`` (n, *batch, 3).  ``controls``
    holds one-sided values on each interval, shape (n-1, 2, *batch, 3): the
    control just after t_i and just before t_{i+1}.  This lets the trapezoid
    rule integrate piecewise-constant controls exactly.
    """

    times: np.ndarray
    points: np.ndarray
    controls: Optional[np.ndarray] = None
    covectors: Optional[np.ndarray] = None

    @property
    def endpoint(self):
        return self.points[-1]


def default_steps(t_end):
    return max(1, int(math.ceil(STEPS_PER_UNIT_TIME * float(np.max(t_end)))))


def _rk4(rhs, y0, dt, steps, record):
    dt = dt[..., None]
    y = y0.copy()
    history = [y.copy()] if record else None
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if record:
            history.append(y.copy())
    return np.stack(history) if record else y


def extremal_rhs(family, eps, variant="adopted"):
    """Right-hand side of the normal Hamiltonian system on (x, y, z, h1, h2, h3).

    ``variant="literal"`` (family one only) uses eps*h3**2 as the vertical
    drift of z instead of eps**2*h3; it exists for the discrepancy report.
    """
    family = Family.coerce(family)
    eps = check_eps(eps)
    if variant not in ("adopted", "literal"):
        raise InvalidParameter(f"unknown variant {variant!r}")

    def rhs(s):
        x, y, h1, h2, h3 = s[..., 0], s[..., 1], s[..., 3], s[..., 4], s[..., 5]
        out = np.empty_like(s)
        if family is Family.ONE:
            out[..., 0] = -h1
            out[..., 1] = h2
            drift = eps * h3 * h3 if variant == "literal" else eps * eps * h3
            out[..., 2] = 0.5 * (h1 * y + h2 * x) + drift
            out[..., 3] = -h2 * h3
            out[..., 4] = -h1 * h3
        else:
            out[..., 0] = h1
            out[..., 1] = h2
            out[..., 2] = 0.5 * (-h1 * y + h2 * x) - eps * eps * h3
            out[..., 3] = -h2 * h3
            out[..., 4] = h1 * h3
        out[..., 5] = 0.0
        return out

    return rhs


def extremal_control(family, eps, h):
    """Maximising control for covector h: (-h1, h2, eps*h3) or (h1, h2, -eps*h3)."""
    family = Family.coerce(family)
    h = as_points(h)
    if family is Family.ONE:
        return np.stack([-h[..., 0], h[..., 1], eps * h[..., 2]], axis=-1)
    return np.stack([h[..., 0], h[..., 1], -eps * h[..., 2]], axis=-1)


def hamiltonian(family, eps, h):
    family = Family.coerce(family)
    h = as_points(h)
    if family is Family.ONE:
        return 0.5 * (-h[..., 0] ** 2 + h[..., 1] ** 2 + eps**2 * h[..., 2] ** 2)
    return 0.5 * (h[..., 0] ** 2 + h[..., 1] ** 2 - eps**2 * h[..., 2] ** 2)


def integrate_extremal(family, eps, h0, t_end, steps=None, record=True, variant="adopted"):
    """Classical RK4 of the full Hamiltonian system from the identity.

    h0 may be a batch (..., 3) with t_end broadcastable against it; every
    sample uses the same number of steps, so the density is at least
    ``steps / max(t_end)``.  Default density is 1000 steps per unit time.
    With ``record=False`` only the endpoint state is kept and a Trajectory
    with two time samples is returned.
    """
    family = Family.coerce(family)
    eps = check_eps(eps)
    h0 = as_points(h0)
    t_end = np.broadcast_to(np.asarray(t_end, float), h0.shape[:-1])
    if np.any(t_end < 0):
        raise InvalidParameter("t_end must be nonnegative")
    steps = default_steps(t_end) if steps is None else int(steps)
    if steps < 1:
        raise InvalidParameter("steps must be positive")
    y0 = np.concatenate([np.zeros(h0.shape), h0], axis=-1)
    dt = t_end / steps
    states = _rk4(extremal_rhs(family, eps, variant), y0, dt, steps, record)
    if not record:
        states = np.stack([y0, states])
        k = np.array([0, steps])
    else:
        k = np.arange(steps + 1)
    times = k.reshape((-1,) + (1,) * t_end.ndim) * dt
    cov = states[..., 3:]
    u = extremal_control(family, eps, cov)
    controls = np.stack([u[:-1], u[1:]], axis=1)
    return Trajectory(times, states[..., :3], controls, cov)


def extremal_endpoint(family, eps, h0, t_end, steps=None, variant="adopted"):
    """(endpoint, final covector) of ``integrate_extremal`` without the history."""
    traj = integrate_extremal(family, eps, h0, t_end, steps, record=False, variant=variant)
    return traj.points[-1], traj.covectors[-1]


def chord_endpoint(eps, start, plan):
    """Exact endpoint for piecewise-constant controls by group-law composition."""
    eps = check_eps(eps)
    q = as_points(start).astype(float)
    for u, duration in plan.segments:
        u = np.asarray(u, float)
        q = group_mul(q, duration * np.array([u[0], u[1], eps * u[2]]))
    return q


def integrate_control(eps, start, plan, steps_per_segment=200):
    """RK4 of q' = u1 X1 + u2 X2 + eps u3 X3 for a piecewise-constant plan."""
    eps = check_eps(eps)
    if not plan.segments:
        raise InvalidParameter("plan has no segments")
    q = as_points(start).astype(float)
    times, points, controls = [np.zeros(1)], [q[None]], []
    t0 = 0.0
    for u, duration in plan.segments:
        u = np.asarray(u, float)
        n = int(steps_per_segment)
        seg = _rk4(lambda s, u=u: dynamics(s, u, eps), q, np.asarray(duration / n), n, True)
        times.append(t0 + duration * np.arange(1, n + 1) / n)
        points.append(seg[1:])
        controls.append(np.broadcast_to(u, (n, 2, 3)))
        q = seg[-1]
        t0 += duration
    return Trajectory(np.concatenate(times), np.concatenate(points), np.concatenate(controls))


def length_functional(traj, eps, family, rtol=1e-12):
    """Trapezoidal integral of the Lorentzian speed sqrt(-g) along ``traj``."""
    check_eps(eps)
    family = Family.coerce(family)
    if traj.controls is None:
        raise InvalidParameter("trajectory carries no controls")
    u = traj.controls
    norm = np.linalg.norm(u, axis=-1)
    if family is Family.ONE:
        speed2 = u[..., 0] ** 2 - u[..., 1] ** 2 - u[..., 2] ** 2
        lead = u[..., 0]
    else:
        speed2 = u[..., 2] ** 2 - u[..., 0] ** 2 - u[..., 1] ** 2
        lead = u[..., 2]
    if np.any(speed2 < -rtol * norm**2) or np.any(lead < -rtol * norm):
        raise NotCausal("a control leaves the causal cone")
    speed = np.sqrt(np.maximum(speed2, 0.0))
    dt = np.diff(traj.times, axis=0)
    return 0.5 * np.sum((speed[:, 0] + speed[:, 1]) * dt, axis=0)


# -- finite-difference Jacobian on the energy level ---------------------------------

def level_params(family, eps, h):
    """Cartesian coordinates of the level {H = -1/2} used as FD parameters.

    Family one: (h2, h3) with h1 = -sqrt(1 + h2**2 + eps**2 h3**2).
    Family two: (h1, h2) with h3 = -sqrt(1 + h1**2 + h2**2)/eps.
    Both graphs cover the whole level sheet and are nonsingular everywhere.
    """
    family = Family.coerce(family)
    h = as_points(h)
    return h[..., 1:] if family is Family.ONE else h[..., :2]


def level_lift(family, eps, ab):
    family = Family.coerce(family)
    ab = np.asarray(ab, float)
    a, b = ab[..., 0], ab[..., 1]
    if family is Family.ONE:
        return np.stack([-np.sqrt(1.0 + a * a + eps**2 * b * b), a, b], axis=-1)
    return np.stack([a, b, -np.sqrt(1.0 + a * a + b * b) / eps], axis=-1)


def chart_factor(family, eps, theta):
    """d(level params)/d(theta, phi) for the hyperboloid charts of each family."""
    family = Family.coerce(family)
    base = np.sinh(theta) * np.cosh(theta)
    return base / eps if family is Family.ONE else base


def _closed_endpoint(family, eps, h, t):
    from .family_one import exp1_covector
    from .family_two import exp2_covector

    fn = exp1_covector if Family.coerce(family) is Family.ONE else exp2_covector
    return fn(eps, h, t)


def fd_jacobian(family, eps, h0, t, h_step=1e-5, endpoint="ode", max_disagreement=1e-6):
    """det of d(endpoint)/d(a, b, t) by central differences.

    (a, b) are the Cartesian level parameters of ``level_params``.  Columns
    are estimated at steps h and h/2 and Richardson-extrapolated; when the
    two estimates disagree by more than ``max_disagreement`` (relative to
    the largest column) the difference quotients are dominated by rounding and
    IllConditioned is raised.  h0 (..., 3) and t broadcast; all samples go
    through one batched integration.
    """
    family = Family.coerce(family)
    eps = check_eps(eps)
    h0 = as_points(h0).astype(float)
    t = np.asarray(t, float)
    h0, t = np.broadcast_arrays(h0, t[..., None])
    t = t[..., 0]
    if h_step <= 0:
        raise InvalidParameter("h_step must be positive")
    level = hamiltonian(family, eps, h0)
    if np.any(np.abs(level + 0.5) > 1e-9 * np.maximum(1.0, np.sum(h0 * h0, axis=-1))):
        raise InvalidParameter("h0 is not on the level {H = -1/2}")
    if np.any(t <= 0):
        raise InvalidParameter("t must be positive")
    ab = level_params(family, eps, h0)
    # perturbation table: (step size, column, sign) -> (d_ab, d_t)
    d_ab = np.zeros((2, 3, 2, 2))
    d_t = np.zeros((2, 3, 2))
    for i, s in enumerate((h_step, 0.5 * h_step)):
        for j, sign in enumerate((1.0, -1.0)):
            d_ab[i, 0, j, 0] = sign * s
            d_ab[i, 1, j, 1] = sign * s
            d_t[i, 2, j] = sign * s
    covs = level_lift(family, eps, ab[..., None, None, None, :] + d_ab)
    times = t[..., None, None, None] + d_t
    if endpoint == "ode":
        ends, _ = extremal_endpoint(family, eps, covs, times, steps=default_steps(times))
    elif endpoint == "closed":
        ends = _closed_endpoint(family, eps, covs, times)
    else:
        raise InvalidParameter(f"unknown endpoint mode {endpoint!r}")
    steps = np.array([h_step, 0.5 * h_step])[:, None, None]
    cols = (ends[..., 0, :] - ends[..., 1, :]) / (2.0 * steps)  # (..., step, column, xyz)
    coarse, fine = cols[..., 0, :, :], cols[..., 1, :, :]
    # scale by the largest column of each sample: at a conjugate point a single
    # column may vanish identically, and that is the signal, not noise
    scale = np.maximum(np.max(np.linalg.norm(fine, axis=-1), axis=-1), np.finfo(float).tiny)
    disagreement = float(np.max(np.linalg.norm(coarse - fine, axis=-1).max(axis=-1) / scale))
    if disagreement > max_disagreement:
        raise IllConditioned(f"difference quotients disagree by {disagreement:.2e} between h and h/2")
    best = fine + (fine - coarse) / 3.0
    det = np.linalg.det(best)  # rows are columns of the Jacobian; det is transpose-invariant
    return float(det) if det.ndim == 0 else det
