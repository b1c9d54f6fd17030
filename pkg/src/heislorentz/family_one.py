"""First family: cone u1 >= sqrt(u2**2 + u3**2), form -w1**2 + w2**2 + w3**2/eps**2.

Normal extremals are parametrised by the hyperboloid chart

    h1 = -cosh(theta),  h2 = sinh(theta) cos(phi),  eps*h3 = sinh(theta) sin(phi)

of the level {H = -1/2}.  Exponential-map routines take (theta, phi, t) and
broadcast like numpy ufuncs.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from . import _special as sp
from .errors import ChartSingular, InvalidParameter, NoConvergence, OutsideCausalShadow
from .group import as_points, check_eps, group_inverse, group_mul
from .regions import RegionVerdict, Status, classify, scaled_tol

DEFAULT_TOL = 1e-9


class Direction(enum.Enum):
    FUTURE = "future"
    PAST = "past"


def chart1(eps, theta, phi):
    """Covector (h1, h2, h3) on {H = -1/2} for chart coordinates (theta, phi)."""
    eps = check_eps(eps)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    sh = np.sinh(theta)
    return np.stack([-np.cosh(theta), sh * np.cos(phi), sh * np.sin(phi) / eps], axis=-1)


def covector_to_chart1(eps, h):
    """Inverse of ``chart1`` with theta >= 0 and phi in [0, 2*pi)."""
    eps = check_eps(eps)
    h = as_points(h)
    r = np.hypot(h[..., 1], eps * h[..., 2])
    theta = np.arcsinh(r)
    phi = np.mod(np.arctan2(eps * h[..., 2], h[..., 1]), 2 * np.pi)
    return theta, phi


def hamiltonian1(eps, h):
    eps = check_eps(eps)
    h = as_points(h)
    return 0.5 * (-h[..., 0] ** 2 + h[..., 1] ** 2 + eps**2 * h[..., 2] ** 2)


def vertical_flow1(eps, h0, t):
    """Closed-form adjoint flow: hyperbolic rotation of (h1, h2) by tau = h3*t."""
    check_eps(eps)
    h0 = as_points(h0)
    tau = h0[..., 2] * np.asarray(t, float)
    c, s = np.cosh(tau), np.sinh(tau)
    h1 = h0[..., 0] * c - h0[..., 1] * s
    h2 = h0[..., 1] * c - h0[..., 0] * s
    return np.stack([h1, h2, np.broadcast_to(h0[..., 2], h1.shape)], axis=-1)


def exp1_covector(eps, h0, t):
    """Endpoint of the normal extremal with initial covector h0 after time t.

    Valid for any h0; on {H = -1/2} this is the arclength-parametrised
    geodesic.  All 1/h3 quotients go through removable-singularity kernels.
    """
    eps = check_eps(eps)
    h0 = as_points(h0)
    t = np.asarray(t, float)
    h1, h2, h3 = h0[..., 0], h0[..., 1], h0[..., 2]
    tau = h3 * t
    shc = sp.sinhc(tau)
    chm = sp.cosh_minus_one_over(tau)
    x = t * (-h1 * shc + h2 * chm)
    y = t * (h2 * shc - h1 * chm)
    z = 0.5 * t * t * (h1 * h1 - h2 * h2) * sp.sinh_minus_id_over_sq(tau) + eps**2 * tau
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def exp1(eps, theta, phi, t):
    """Exp(theta, phi, t) for the first family."""
    return exp1_covector(eps, chart1(eps, theta, phi), t)


def jacobian1(eps, theta, phi, t):
    """det d(x, y, z)/d(t, theta, phi) of ``exp1``.

    Closed form  eps**3 sinh(theta) [ (t/eps)**2 sinhc(tau)
                                      + (t/eps)**4 (2 - 2cosh tau + tau sinh tau)/tau**4 ],
    with tau = h3*t.  Both brackets are positive, so J has the sign of theta
    for t > 0.  The chart itself degenerates at theta = 0.
    """
    eps = check_eps(eps)
    theta, phi, t = np.broadcast_arrays(*(np.asarray(a, float) for a in (theta, phi, t)))
    if np.any(np.sinh(theta) == 0.0):
        raise ChartSingular("the (theta, phi) chart degenerates at theta = 0")
    s = np.sinh(theta) * np.sin(phi)
    tau = s * t / eps
    te = t / eps
    bracket = te**2 * sp.sinhc(tau) + te**4 * sp.conj_kernel_over_quartic(tau)
    out = eps**3 * np.sinh(theta) * bracket
    return out if out.ndim else float(out)


def boundary_height(eps, x, y):
    """Height phi_eps(x, y) of the boundary surface and its parameter tau.

    tau = arccosh((x**2 - y**2)/(2 eps**2) + 1), phi_eps = eps**2 (sinh tau + tau)/2.
    """
    eps = check_eps(eps)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if np.any(x < np.abs(y)):
        raise OutsideCausalShadow("boundary height needs x >= |y|")
    tau = _shadow_tau(eps, x, y)
    height = 0.5 * eps**2 * (np.sinh(tau) + tau)
    if height.ndim == 0:
        return float(height), float(tau)
    return height, tau


def _shadow_tau(eps, x, y):
    # arccosh(1 + w) = 2 asinh(sqrt(w/2)), accurate for small w
    w = np.maximum((x - np.abs(y)) * (x + np.abs(y)), 0.0) / (2 * eps**2)
    return 2.0 * np.arcsinh(np.sqrt(w / 2.0))


def attain_region1(eps, q, tol=DEFAULT_TOL):
    """Tri-state membership in the attainable set from the identity.

    ``tol`` is relative to max(1, |x|, |y|, |z|).
    """
    eps = check_eps(eps)
    q = as_points(q)
    x, y, z = (float(c) for c in q)
    atol = scaled_tol(q, tol)
    shadow = x - abs(y)
    if shadow < -atol:
        return RegionVerdict(Status.EXTERIOR, -shadow, None)
    xc = max(x, abs(y))
    height, tau = boundary_height(eps, xc, y)
    return classify(shadow, abs(z) - height, atol, tau)


def attain_translated(eps, q1, q, direction=Direction.FUTURE, tol=DEFAULT_TOL):
    """Membership of q in the causal future (or past) of q1.

    Left-invariance reduces this to the identity; the past set is the image
    of the future set under q -> q**-1.
    """
    direction = Direction(direction)
    p = group_mul(group_inverse(q1), q)
    if direction is Direction.PAST:
        p = group_inverse(p)
    return attain_region1(eps, p, tol)


# -- inversion on N = {theta > 0, 0 < phi < pi, tau > 0} -------------------------------

def _exp1_n(eps, theta, phi, tau, with_jac=False):
    """Exp in (theta, phi, tau) coordinates, optionally with its 3x3 Jacobian."""
    sh = np.sinh(theta)
    coth = np.cosh(theta) / sh
    sf, cf = np.sin(phi), np.cos(phi)
    cot = cf / sf
    st, ct = np.sinh(tau), np.cosh(tau)
    cm1 = 2.0 * np.sinh(tau / 2.0) ** 2
    smt = sp.sinh_minus_id(tau)
    s2 = (sh * sf) ** 2
    x = eps * (coth * st / sf + cot * cm1)
    y = eps * (cot * st + coth * cm1 / sf)
    z = eps**2 * (smt / (2.0 * s2) + 0.5 * (st + tau))
    q = np.stack([x, y, z], axis=-1)
    if not with_jac:
        return q
    sf2 = sf * sf
    jac = np.array([
        [-eps * st / (sh * sh * sf),
         -eps * (coth * st * cf + cm1) / sf2,
         eps * (coth * ct / sf + cot * st)],
        [-eps * cm1 / (sh * sh * sf),
         -eps * (st + coth * cm1 * cf) / sf2,
         eps * (cot * ct + coth * st / sf)],
        [-eps**2 * smt * np.cosh(theta) / (sf2 * sh**3),
         -eps**2 * smt * cf / (sh * sh * sf2 * sf),
         eps**2 * (cm1 / (2.0 * s2) + 0.5 * (ct + 1.0))],
    ])
    return q, jac


def _lightcone_logs(eps, theta, phi, tau, with_jac=False):
    """log(x + y), log(x - y), log(z) of Exp on N, optionally with derivatives.

    Near the light cone x - y is tiny compared with x + y, so matching these
    three logarithms is far better conditioned than matching (x, y, z).
    """
    sh = np.sinh(theta)
    coth = np.cosh(theta) / sh
    sf, cf = np.sin(phi), np.cos(phi)
    a_plus = coth / sf + cf / sf
    # coth - cos(phi) without cancellation for large theta and small phi
    gap = np.exp(-theta) / sh + 2.0 * np.sin(phi / 2.0) ** 2
    a_minus = gap / sf
    em_p = np.expm1(tau)
    em_m = -np.expm1(-tau)
    logs = np.array([
        math.log(eps) + np.log(a_plus) + np.log(em_p),
        math.log(eps) + np.log(a_minus) + np.log(em_m),
        0.0,
    ])
    q, jac = _exp1_n(eps, theta, phi, tau, with_jac=True)
    logs[2] = np.log(q[2])
    if not with_jac:
        return logs
    sf2 = sf * sf
    d_coth = -1.0 / (sh * sh)
    # 1 - coth*cos(phi), again cancellation-free
    one_minus = 2.0 * np.sin(phi / 2.0) ** 2 - cf * np.exp(-theta) / sh
    dl = np.array([
        [d_coth / sf / a_plus, -(coth * cf + 1.0) / sf2 / a_plus, np.exp(tau) / em_p],
        [d_coth / sf / a_minus, one_minus / sf2 / a_minus, 1.0 / np.expm1(tau)],
        jac[2] / q[2],
    ])
    return logs, dl


def _from_w(w):
    a, b, c = w
    theta = math.exp(a)
    sig = 1.0 / (1.0 + math.exp(-b))
    return theta, math.pi * sig, math.exp(c), (theta, math.pi * sig * (1.0 - sig), math.exp(c))


def _to_w(theta, phi, tau):
    s = phi / math.pi
    return np.array([math.log(theta), math.log(s / (1.0 - s)), math.log(tau)])


def _target_logs(q):
    x, y, z = q
    return np.array([math.log(x + y), math.log(x - y), math.log(z)])


def _seed_grid(eps, q, n=32, n_best=256):
    x, y, _ = q
    tau_cap = float(_shadow_tau(eps, x, y)) + 1.0
    thetas = np.geomspace(1e-3, 10.0, n)
    phis = np.pi * (np.arange(n) + 0.5) / n
    taus = np.geomspace(min(1e-3, tau_cap * 1e-3), tau_cap, n)
    T, P, U = np.meshgrid(thetas, phis, taus, indexing="ij")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pts = _exp1_n(eps, T, P, U)
        u, v, z = pts[..., 0] + pts[..., 1], pts[..., 0] - pts[..., 1], pts[..., 2]
        logs = np.stack([np.log(u), np.log(v), np.log(z)], axis=-1)
    res = np.max(np.abs(logs - _target_logs(q)), axis=-1)
    res = np.where(np.isfinite(res), res, np.inf).ravel()
    keep = min(n_best, res.size)
    best = np.argpartition(res, keep - 1)[:keep]
    best = best[np.argsort(res[best])]
    return [(T.flat[i], P.flat[i], U.flat[i]) for i in best]


def _newton(eps, q, seed, max_iter):
    target = _target_logs(q)
    w = _to_w(*seed)

    def resid(w):
        theta, phi, tau, _ = _from_w(w)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return _lightcone_logs(eps, theta, phi, tau) - target

    r = resid(w)
    nr = float(np.linalg.norm(r))
    for _ in range(max_iter):
        if not np.isfinite(nr) or nr < 1e-15:
            break
        theta, phi, tau, dw = _from_w(w)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            _, jac = _lightcone_logs(eps, theta, phi, tau, with_jac=True)
        jac = jac * np.asarray(dw)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        while lam > 1e-12:
            w_new = w + lam * step
            if np.all(np.abs(w_new) < 60.0):
                r_new = resid(w_new)
                n_new = float(np.linalg.norm(r_new))
                if np.isfinite(n_new) and n_new < (1.0 - 1e-4 * lam) * nr:
                    break
            lam *= 0.5
        else:
            break
        w, r, nr = w_new, r_new, n_new
    theta, phi, tau, _ = _from_w(w)
    with np.errstate(over="ignore", invalid="ignore"):
        q_hat = _exp1_n(eps, theta, phi, tau)
    scale = max(1.0, float(np.max(np.abs(q))))
    res = float(np.max(np.abs(q_hat - q))) / scale
    return w, res if np.isfinite(res) else math.inf


def invert_exp1(eps, q, tol=DEFAULT_TOL, max_iter=100, n_seeds=8):
    """Unique (theta, phi, t) in N with exp1 = q, for q interior with z > 0.

    Seeds come from a 32**3 grid (log-spaced theta and tau); each seed is
    refined by damped Newton in log/logit coordinates that keep the iterate
    inside N.  The residual is taken in log(x + y), log(x - y), log(z).
    Raises NoConvergence when no seed reaches ``tol`` (relative to
    max(1, |q|)).
    """
    eps = check_eps(eps)
    q = as_points(q).astype(float)
    verdict = attain_region1(eps, q, tol)
    if verdict.status is not Status.INTERIOR or q[2] <= 0:
        raise InvalidParameter(f"invert_exp1 needs an interior point with z > 0, got {verdict.status.value}")
    best = math.inf
    tried = set()
    for seed in _seed_grid(eps, q):
        key = tuple(np.round(np.log(seed), 1))
        if key in tried:
            continue
        tried.add(key)
        w, res = _newton(eps, q, seed, max_iter)
        best = min(best, res)
        if res <= tol:
            theta, phi, tau, _ = _from_w(w)
            t = tau * eps / (math.sinh(theta) * math.sin(phi))
            return theta, phi, t
        if len(tried) >= n_seeds:
            break
    raise NoConvergence("exponential-map inversion did not converge", best)


def distance1(eps, q, tol=DEFAULT_TOL):
    """Lorentzian distance from the identity, or None outside the attainable set."""
    eps = check_eps(eps)
    q = as_points(q).astype(float)
    verdict = attain_region1(eps, q, tol)
    if verdict.status is Status.EXTERIOR:
        return None
    if verdict.status is Status.BOUNDARY:
        return 0.0
    x, y, z = q
    if abs(z) <= scaled_tol(q, tol):
        return math.sqrt((x - abs(y)) * (x + abs(y)))
    # d(x, y, -z) = d(x, y, z): time reversal composed with (x, y) -> (-x, -y)
    target = np.array([x, y, abs(z)])
    return invert_exp1(eps, target, tol)[2]


# -- spheres and the boundary surface ------------------------------------------------

@dataclass(frozen=True)
class SphereSpec:
    radius: float
    n_theta: int = 21
    n_phi: int = 41
    theta_range: tuple = (0.0, 2.0)
    phi_range: tuple = (0.0, 2 * math.pi)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidParameter("sphere radius must be positive")
        if self.n_theta < 2 or self.n_phi < 2:
            raise InvalidParameter("sphere grid needs at least 2 samples per axis")


@dataclass
class GridSamples:
    """Points on a parametrised surface, shape (n_u, n_v, 3), row-major in (u, v)."""

    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    normals: np.ndarray = field(default=None)
    labels: tuple = ("u", "v")

    @property
    def shape(self):
        return self.points.shape[:2]

    def rows(self):
        """Flat (u, v, x, y, z) records in row-major order."""
        U, V = np.meshgrid(self.u, self.v, indexing="ij")
        return np.column_stack([U.ravel(), V.ravel(), self.points.reshape(-1, 3)])


def sphere1(eps, spec):
    """Sample S(r) = {Exp(theta, phi, r)} on the grid in ``spec``."""
    eps = check_eps(eps)
    thetas = np.linspace(*spec.theta_range, spec.n_theta)
    phis = np.linspace(*spec.phi_range, spec.n_phi)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    return GridSamples(thetas, phis, exp1(eps, T, P, spec.radius), labels=("theta", "phi"))


def lightlike_surface1(eps, alphas, taus, sheet=1):
    """Samples of the boundary surface S filled by lightlike (abnormal) curves.

    The curve with covector (h1, h2, h3) = (-eps cosh a, eps sinh a, 1) is
    traced up to parameter tau >= 0; ``sheet=-1`` mirrors to z < 0.  Normals
    are the exterior normals of the attainable set.
    """
    eps = check_eps(eps)
    if sheet not in (1, -1):
        raise InvalidParameter("sheet must be +1 or -1")
    alphas = np.asarray(alphas, float)
    taus = np.asarray(taus, float)
    if np.any(taus < 0):
        raise InvalidParameter("tau must be nonnegative")
    A, T = np.meshgrid(alphas, taus, indexing="ij")
    ca, sa = np.cosh(A), np.sinh(A)
    st, cm1, th2 = np.sinh(T), 2.0 * np.sinh(T / 2) ** 2, np.tanh(T / 2)
    x = eps * (ca * st + sa * cm1)
    y = eps * (sa * st + ca * cm1)
    z = sheet * 0.5 * eps**2 * (st + T)
    k = 0.5 * eps * (np.cosh(T) + 1.0)
    normals = np.stack([-k * (ca + sa * th2), k * (sa + ca * th2), sheet * np.ones_like(T)], axis=-1)
    return GridSamples(alphas, taus, np.stack([x, y, z], axis=-1), normals, labels=("alpha", "tau"))


def surface_normal1(eps, q):
    """Exterior normal of the attainable set at a boundary point with z > 0 and x > |y|."""
    eps = check_eps(eps)
    q = as_points(q)
    x, y = q[..., 0], q[..., 1]
    tau = _shadow_tau(eps, x, y)
    k = (np.cosh(tau) + 1.0) / np.sinh(tau)
    return np.stack([-0.5 * x * k, 0.5 * y * k, np.ones_like(x)], axis=-1)
