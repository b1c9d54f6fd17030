import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np


class Status(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class RegionVerdict:
    """Tri-state membership.

    ``defect`` is positive outside the set and nonpositive inside; it is the
    larger of |y| - x and |z| - (boundary height).  ``tau`` is the boundary
    parameter at (x, y) when x >= |y|.
    """

    status: Status
    defect: float
    tau: Optional[float] = None

    @property
    def member(self):
        return self.status is not Status.EXTERIOR


def scaled_tol(q, tol):
    if tol <= 0:
        raise ValueError("tol must be positive")
    return tol * max(1.0, float(np.max(np.abs(q))))


def classify(shadow, height_gap, tol_abs, tau=None):
    """Shared tri-state logic.

    shadow = x - |y| (or its analogue), height_gap = |z| - height.
    """
    if shadow < -tol_abs:
        return RegionVerdict(Status.EXTERIOR, float(-shadow), tau)
    defect = float(max(-shadow, height_gap))
    if height_gap > tol_abs:
        return RegionVerdict(Status.EXTERIOR, defect, tau)
    if abs(shadow) <= tol_abs or abs(height_gap) <= tol_abs:
        return RegionVerdict(Status.BOUNDARY, defect, tau)
    return RegionVerdict(Status.INTERIOR, defect, tau)
