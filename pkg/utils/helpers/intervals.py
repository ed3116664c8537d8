"""
One-dimensional harness: centers of the pair of intervals [-R, -1] U [1, R].

On the right interval the derivative of V^(alpha) is

    F(x) = (x + R)^(a-1) - (x + 1)^(a-1) + (x - 1)^(a-1) - (R - x)^(a-1)

and at alpha = m = 1 the log potential takes over with

    G(x) = log(x + R) - log(x + 1) + log(x - 1) - log(R - x),

whose zero is sqrt(R). The problem is symmetric, so roots come in pairs +-x0.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

from scipy.optimize import bisect

from utils.helpers.errors import SolverError

LINE = 1
ALPHA_TOL = 1e-12


@dataclass(frozen=True)
class IntervalCenters:
    points: Tuple[float, ...]
    continuum: bool
    alpha: float
    R: float


def derivative(R: float, alpha: float) -> Callable[[float], float]:
    if abs(alpha - LINE) <= ALPHA_TOL:
        return lambda x: math.log(x + R) - math.log(x + 1) + math.log(x - 1) - math.log(R - x)
    p = alpha - 1
    return lambda x: (x + R) ** p - (x + 1) ** p + (x - 1) ** p - (R - x) ** p


def interval_pair_center(R: float, alpha: float) -> IntervalCenters:
    """
    Centers of the two-interval body for a given alpha.

    alpha = 2 returns the endpoints of the continuum [-1, 1]; alpha > 2 returns
    the origin; every other alpha returns the mirrored root pair found by
    bisection on (1 + 1e-6 (R - 1), (R + 1) / 2).

    Raises:
        ValueError: If R <= 1.
        SolverError: If the bracket holds no sign change.
    """
    R = float(R)
    alpha = float(alpha)
    if not R > 1:
        raise ValueError("interval_pair_center needs R > 1")
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if abs(alpha - 2) <= ALPHA_TOL:
        return IntervalCenters((-1.0, 1.0), True, alpha, R)
    if alpha > 2:
        return IntervalCenters((0.0,), False, alpha, R)

    f = derivative(R, alpha)
    lo = 1 + 1e-6 * (R - 1)
    hi = 0.5 * (R + 1)
    f_lo, f_hi = f(lo), f(hi)
    if f_hi == 0.0:
        root = hi
    elif f_lo * f_hi > 0 or math.isnan(f_lo * f_hi):
        raise SolverError(f"no isolated root of the derivative in ({lo}, {hi}) for alpha={alpha}")
    else:
        root = bisect(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=400)
    return IntervalCenters((-root, root), False, alpha, R)
