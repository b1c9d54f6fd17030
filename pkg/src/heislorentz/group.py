"""Heisenberg group law, left-invariant frame and the two Lorentzian structures.

Points, tangent vectors and controls are numpy arrays whose last axis has
length 3, so every routine broadcasts over batches of samples.  Tangent
vectors are given by their components (dx, dy, dz) in the global chart and
are evaluated at an explicit base point where that matters.
"""

import enum

import numpy as np

from .errors import InvalidParameter

IDENTITY = np.zeros(3)


class Family(enum.Enum):
    """Selects the control cone and the Lorentzian form.

    ``ONE``: cone u1 >= sqrt(u2**2 + u3**2), form -w1**2 + w2**2 + w3**2/eps**2.
    ``TWO``: cone u3 >= sqrt(u1**2 + u2**2), form  w1**2 + w2**2 - w3**2/eps**2.
    """

    ONE = 1
    TWO = 2

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(int(value))


class Regime(enum.Enum):
    MAXIMIZERS_EXIST = "maximizers-exist"
    PERIODIC_NO_MAXIMIZERS = "periodic-no-maximizers"
    UNCLASSIFIED = "unclassified"


def check_eps(eps):
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0.0:
        raise InvalidParameter(f"eps must be a positive finite number, got {eps!r}")
    return eps


def as_points(q):
    q = np.asarray(q, dtype=float)
    if q.shape[-1:] != (3,):
        raise InvalidParameter(f"expected trailing axis of length 3, got shape {q.shape}")
    return q


def group_mul(a, b):
    """Heisenberg product (x1+x2, y1+y2, z1+z2+(x1*y2 - x2*y1)/2)."""
    a = as_points(a)
    b = as_points(b)
    x = a[..., 0] + b[..., 0]
    y = a[..., 1] + b[..., 1]
    z = a[..., 2] + b[..., 2] + 0.5 * (a[..., 0] * b[..., 1] - b[..., 0] * a[..., 1])
    return np.stack([x, y, z], axis=-1)


def group_inverse(a):
    return -as_points(a)


def frame(q):
    """Columns X1, X2, X3 at q, shape (..., 3, 3) with the field index last."""
    q = as_points(q)
    out = np.zeros(q.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 2, 0] = -0.5 * q[..., 1]
    out[..., 1, 1] = 1.0
    out[..., 2, 1] = 0.5 * q[..., 0]
    out[..., 2, 2] = 1.0
    return out


def coframe(q, v):
    """Values (w1, w2, w3)(v) of the dual coframe at base point q."""
    q = as_points(q)
    v = as_points(v)
    w3 = 0.5 * q[..., 1] * v[..., 0] - 0.5 * q[..., 0] * v[..., 1] + v[..., 2]
    return np.stack([v[..., 0], v[..., 1], w3], axis=-1)


def dynamics(q, u, eps):
    """Velocity u1*X1 + u2*X2 + eps*u3*X3 at q (shared by both families)."""
    eps = check_eps(eps)
    q, u = np.broadcast_arrays(as_points(q), as_points(u))
    dz = -0.5 * q[..., 1] * u[..., 0] + 0.5 * q[..., 0] * u[..., 1] + eps * u[..., 2]
    return np.stack([u[..., 0], u[..., 1], dz], axis=-1)


def left_translate_vector(a, v):
    """Push-forward of v by the differential of left multiplication by a."""
    a = as_points(a)
    v = as_points(v)
    dz = v[..., 2] + 0.5 * (a[..., 0] * v[..., 1] - a[..., 1] * v[..., 0])
    return np.stack([v[..., 0], v[..., 1], dz], axis=-1)


def cone_contains(u, family, rtol=0.0):
    """Membership of a control in the closed cone of ``family``.

    Boundary (lightlike) controls are admitted.  ``rtol`` widens the test by
    ``rtol * |u|`` to absorb rounding in computed controls.
    """
    family = Family.coerce(family)
    u = as_points(u)
    slack = rtol * np.linalg.norm(u, axis=-1)
    if family is Family.ONE:
        return u[..., 0] + slack >= np.hypot(u[..., 1], u[..., 2])
    return u[..., 2] + slack >= np.hypot(u[..., 0], u[..., 1])


def cone_interior(u, family):
    family = Family.coerce(family)
    u = as_points(u)
    if family is Family.ONE:
        return u[..., 0] > np.hypot(u[..., 1], u[..., 2])
    return u[..., 2] > np.hypot(u[..., 0], u[..., 1])


def lorentz_form(v, base, eps, family):
    """g(v, v) for the tangent vector v at ``base``."""
    eps = check_eps(eps)
    family = Family.coerce(family)
    w = coframe(base, v)
    spatial = w[..., 2] ** 2 / eps**2
    if family is Family.ONE:
        return -w[..., 0] ** 2 + w[..., 1] ** 2 + spatial
    return w[..., 0] ** 2 + w[..., 1] ** 2 - spatial


def control_of_velocity(v, base, eps):
    """Invert ``dynamics``: the control realising velocity v at ``base``."""
    eps = check_eps(eps)
    w = coframe(base, v)
    return np.stack([w[..., 0], w[..., 1], w[..., 2] / eps], axis=-1)


def classify_commutant(eps, family):
    """Place the vertical line R*X3 relative to the future/past cones at the identity.

    If it meets the closed cone only at 0, length maximizers exist between
    causally related points.  If it lies inside the open double cone, the
    structure has periodic nonspacelike loops and no maximizers.
    """
    eps = check_eps(eps)
    family = Family.coerce(family)
    up = control_of_velocity(np.array([0.0, 0.0, 1.0]), IDENTITY, eps)
    down = -up
    in_closed = bool(cone_contains(up, family)) or bool(cone_contains(down, family))
    if not in_closed:
        return Regime.MAXIMIZERS_EXIST
    if bool(cone_interior(up, family)) or bool(cone_interior(down, family)):
        return Regime.PERIODIC_NO_MAXIMIZERS
    return Regime.UNCLASSIFIED
