"""The eps -> 0 limit of the first family (sub-Lorentzian problem).

The limit cone is {dx >= |dy|, dz = 0}, extremals are parametrised by
(psi, c) with covector (-cosh psi, sinh psi, c), and the attainable set is
A0 = {x >= 0, 4|z| <= x**2 - y**2}.  The functions here measure how the
first family approaches these objects.
"""

from dataclasses import dataclass
import math
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from . import _special as sp
from .errors import InvalidParameter
from .family_one import attain_region1, boundary_height, exp1
from .group import as_points, check_eps
from .regions import classify, scaled_tol


def exp0(psi, c, t):
    """Limit exponential map.

    x = t cosh(psi + ct/2) sinhc(ct/2), y = t sinh(psi + ct/2) sinhc(ct/2),
    z = (sinh ct - ct)/(2c**2); the c -> 0 limit is (t cosh psi, t sinh psi, 0).
    """
    psi, c, t = np.broadcast_arrays(*(np.asarray(a, float) for a in (psi, c, t)))
    u = c * t
    half = sp.sinhc(0.5 * u)
    x = t * np.cosh(psi + 0.5 * u) * half
    y = t * np.sinh(psi + 0.5 * u) * half
    z = 0.5 * t * t * sp.sinh_minus_id_over_sq(u)
    return np.stack([x, y, z], axis=-1)


def transfer(eps, psi, c):
    """(theta, phi) of the first-family chart with sinh(theta)cos(phi) = sinh(psi)
    and sinh(theta)sin(phi) = eps*c; phi in [0, 2*pi)."""
    eps = check_eps(eps)
    psi = np.asarray(psi, float)
    c = np.asarray(c, float)
    a, b = np.sinh(psi), eps * c
    theta = np.arcsinh(np.hypot(a, b))
    phi = np.mod(np.arctan2(b, a), 2 * np.pi)
    if theta.ndim == 0:
        return float(theta), float(phi)
    return theta, phi


def attain0(q, tol=1e-9):
    """Tri-state membership in A0; ``tol`` is relative to max(1, |q|)."""
    q = as_points(q)
    x, y, z = (float(v) for v in q)
    atol = scaled_tol(q, tol)
    shadow = x - abs(y)
    if shadow < -atol:
        return classify(shadow, 0.0, atol)
    return classify(shadow, abs(z) - 0.25 * (x - abs(y)) * (x + abs(y)), atol)


def cone_indicator(v, eps):
    """Membership of a vector at the identity in the cone C_eps (eps >= 0)."""
    v = as_points(v)
    eps = float(eps)
    if not eps >= 0 or not math.isfinite(eps):
        raise InvalidParameter("eps must be a nonnegative finite number")
    dx, dy, dz = v[..., 0], v[..., 1], v[..., 2]
    if eps == 0.0:
        return (dx >= 0) & (dx * dx >= dy * dy) & (dz == 0)
    with np.errstate(over="ignore"):  # dz/eps -> inf is the right answer for tiny eps
        return (dx >= 0) & (dx * dx >= dy * dy + (dz / eps) ** 2)


@dataclass
class ConvergenceReport:
    """Measured sequence along decreasing eps.

    For indicator reports ``errors`` are 0/1 mismatches with the limit set
    and ``members`` the per-eps memberships; ``monotone`` is the property
    that is meaningful for each report (see the producing function).
    """

    eps_values: List[float]
    errors: List[float]
    monotone: bool
    members: Optional[List[bool]] = None


def _check_decreasing(eps_list):
    eps_list = [check_eps(e) for e in eps_list]
    if len(eps_list) < 1 or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise InvalidParameter("eps_list must be nonempty and strictly decreasing")
    return eps_list


def indicator_convergence(q, eps_list, tol=1e-9):
    """chi_{A_eps}(q) along decreasing eps versus chi_{A0}(q).

    ``monotone`` is True when membership never switches back on as eps
    decreases (the sets shrink).
    """
    eps_list = _check_decreasing(eps_list)
    q = as_points(q).astype(float)
    limit_member = attain0(q, tol).member
    members = [attain_region1(e, q, tol).member for e in eps_list]
    errors = [float(m != limit_member) for m in members]
    monotone = all(not (b and not a) for a, b in zip(members, members[1:]))
    return ConvergenceReport(eps_list, errors, monotone, members)


def membership_threshold(q, eps_hi=1e3):
    """The eps* where q = (x, y, z) with x > |y| enters the boundary of A_eps.

    Membership holds for eps >= eps* since the height phi_eps(x, y) increases
    with eps.  Returns 0 when q is already in A0 and None when q is outside
    every A_eps.
    """
    x, y, z = (float(v) for v in as_points(q))
    if x <= abs(y):
        return None
    if abs(z) <= 0.25 * (x * x - y * y):
        return 0.0
    gap = lambda e: boundary_height(e, x, y)[0] - abs(z)
    if gap(eps_hi) < 0:
        return None
    lo = eps_hi
    while gap(lo) >= 0 and lo > 1e-12:
        lo *= 0.5
    return brentq(gap, lo, eps_hi, xtol=1e-14, rtol=1e-13)


def exp_convergence(psi, c, t, eps_list):
    """Sup-norm distance between exp1(transfer(eps)) and exp0 along eps.

    ``monotone`` reports strict decrease; it is not required by the theory.
    """
    eps_list = _check_decreasing(eps_list)
    target = exp0(psi, c, t)
    errors = []
    for e in eps_list:
        theta, phi = transfer(e, psi, c)
        errors.append(float(np.max(np.abs(exp1(e, theta, phi, t) - target))))
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    return ConvergenceReport(eps_list, errors, monotone)


def _grid(n_psi, n_c, psi_range, c_range):
    if n_psi < 1 or n_c < 1:
        raise InvalidParameter("grid counts must be positive")
    psis = np.linspace(*psi_range, n_psi) if n_psi > 1 else np.array([0.5 * sum(psi_range)])
    cs = np.linspace(*c_range, n_c) if n_c > 1 else np.array([0.5 * sum(c_range)])
    return np.meshgrid(psis, cs, indexing="ij")


def sphere_samples(r, eps, n_psi=40, n_c=40, psi_range=(-2.0, 2.0), c_range=(-2.0, 2.0)):
    """(S0 points, S_eps points) on one (psi, c) grid, both of shape (n, 3).

    S_eps(r) is sampled at the transferred chart points, so row i of both
    arrays comes from the same covector direction.
    """
    if not r > 0:
        raise InvalidParameter("radius must be positive")
    P, C = _grid(n_psi, n_c, psi_range, c_range)
    s0 = exp0(P, C, r).reshape(-1, 3)
    theta, phi = transfer(eps, P, C)
    se = exp1(eps, theta, phi, r).reshape(-1, 3)
    return s0, se


def sphere_semicontinuity(r, eps, n_psi=40, n_c=40, psi_range=(-2.0, 2.0), c_range=(-2.0, 2.0)):
    """Grid proxy for sup_{q in S0(r)} dist(q, S_eps(r)) (Euclidean).

    Small values mean every sampled point of the limit sphere is close to
    the eps-sphere, the lower-semicontinuity direction.
    """
    s0, se = sphere_samples(r, eps, n_psi, n_c, psi_range, c_range)
    d, _ = cKDTree(se).query(s0)
    return float(np.max(d))


def sphere_upper_proxy(r, eps, n_psi=40, n_c=40, psi_range=(-2.0, 2.0), c_range=(-2.0, 2.0)):
    """The reverse one-sided distance sup_{q in S_eps(r)} dist(q, S0(r)); reported only."""
    s0, se = sphere_samples(r, eps, n_psi, n_c, psi_range, c_range)
    d, _ = cKDTree(s0).query(se)
    return float(np.max(d))
