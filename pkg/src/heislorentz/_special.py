"""Cancellation-free kernels shared by the closed-form exponential maps.

Every quotient here has a removable singularity at 0.  Below ``SERIES_CUTOFF``
the Taylor series is summed instead of the direct quotient.
"""

import math

import numpy as np

SERIES_CUTOFF = 0.5

# (sinh u - u) / u**2 = sum_k u**(2k+1) / (2k+3)!
_SHM_COEFFS = [1.0 / math.factorial(2 * k + 3) for k in range(8)]
# (2 - 2 cosh u + u sinh u) / u**4 = sum_k (2k+2) u**(2k) / (2k+4)!
_G_COEFFS = [(2.0 * k + 2.0) / math.factorial(2 * k + 4) for k in range(8)]


def _series(u2, coeffs):
    out = np.zeros_like(u2)
    for c in reversed(coeffs):
        out = out * u2 + c
    return out


def sinhc(u):
    """sinh(u)/u, equal to 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-8
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 + u * u / 6.0, np.sinh(safe) / safe)


def sinc(u):
    """Unnormalised sin(u)/u."""
    return np.sinc(np.asarray(u, dtype=float) / np.pi)


def sinh_minus_id_over_sq(u):
    """(sinh u - u) / u**2, odd in u, ~ u/6 near 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (np.sinh(safe) - safe) / (safe * safe)
    return np.where(small, u * _series(u * u, _SHM_COEFFS), direct)


def id_minus_sin_over_sq(u):
    """(u - sin u) / u**2, odd in u, ~ u/6 near 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (safe - np.sin(safe)) / (safe * safe)
    alt = [c * (-1) ** k for k, c in enumerate(_SHM_COEFFS)]
    return np.where(small, u * _series(u * u, alt), direct)


def cosh_minus_one_over(u):
    """(cosh u - 1)/u, computed as sinh(u/2) * sinhc(u/2)."""
    u = np.asarray(u, dtype=float)
    return np.sinh(u / 2.0) * sinhc(u / 2.0)


def cos_minus_one_over(u):
    """(cos u - 1)/u, computed as -sin(u/2) * sinc(u/2)."""
    u = np.asarray(u, dtype=float)
    return -np.sin(u / 2.0) * sinc(u / 2.0)


def sinh_minus_id(u):
    u = np.asarray(u, dtype=float)
    return u * u * sinh_minus_id_over_sq(u)


def conj_kernel_over_quartic(u):
    """(2 - 2 cosh u + u sinh u) / u**4, even, equal to 1/12 at 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (2.0 - 2.0 * np.cosh(safe) + safe * np.sinh(safe)) / safe**4
    return np.where(small, _series(u * u, _G_COEFFS), direct)
