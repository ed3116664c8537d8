"""
Renormalized r^(alpha-2) potentials of planar bodies.

All evaluations go through contour integrals along the oriented boundary, so
no renormalization constant ever has to be subtracted numerically:

    V^(a)(x)   = (1/a) * oint r^(a-2) (y-x) x dy         a != 0
    V^(0)(x)   =        oint log(r) / r^2 (y-x) x dy
    V^log(x)   = -1/2 * oint (log(r) - 1/2) (y-x) x dy
    grad V^(a) = -oint r^(a-2) n ds
    d2V/dxj2   = (a-2) * oint r^(a-4) (y_j-x_j) n_j ds

where (y-x) x dy is the planar cross product and n ds = (dy_2, -dy_1) on a
counter-clockwise loop.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils.helpers.background import map_ordered
from utils.helpers.errors import DomainError, NotStarShapedError
from utils.helpers.geometry import (
    Body,
    RayCrossings,
    boundary_distance,
    classify_points,
    radial_profile,
)
from utils.helpers.logger import logger
from utils.helpers.quadrature import QuadratureSpec, contour_integral
from utils.helpers.telemetry import get_telemetry

PLANE = 2
ALPHA_ZERO_TOL = 1e-8
ALPHA_M_TOL = 1e-12


class Regime(str, Enum):
    ABOVE_M = "above_m"
    AT_M = "at_m"
    BETWEEN = "between"
    ZERO = "zero"
    NEGATIVE = "negative"


def normalize_alpha(alpha: float) -> float:
    """Snap |alpha| < 1e-8 to exactly 0 and alpha within 1e-12 of m to m."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    if abs(alpha) < ALPHA_ZERO_TOL:
        return 0.0
    if abs(alpha - PLANE) <= ALPHA_M_TOL:
        return float(PLANE)
    return alpha


def classify_regime(alpha: float, m: int = PLANE) -> Regime:
    alpha = normalize_alpha(alpha)
    if alpha == 0.0:
        return Regime.ZERO
    if alpha < 0:
        return Regime.NEGATIVE
    if alpha == m:
        return Regime.AT_M
    return Regime.ABOVE_M if alpha > m else Regime.BETWEEN


@dataclass(frozen=True)
class PotentialSample:
    value: float
    regime: Regime
    quad_error: float
    renormalized: bool
    alpha: Optional[float] = None


@dataclass(frozen=True)
class LaplacianResult:
    value: float
    identity: float
    discrepancy: float


@lru_cache(maxsize=None)
def sphere_area(m: int) -> float:
    """
    Area of the unit sphere S^(m-1) in R^m, 2 pi^(m/2) / Gamma(m/2).

    Uses A(1) = 2, A(2) = 2 pi and A(m + 2) = 2 pi A(m) / m.
    """
    if m < 1:
        raise ValueError("sphere_area needs m >= 1")
    if m == 1:
        return 2.0
    if m == 2:
        return 2.0 * math.pi
    return 2.0 * math.pi * sphere_area(m - 2) / (m - 2)


def eval_ball(r: float, alpha: float, m: int = PLANE) -> float:
    """Potential of the m-ball of radius r at its center."""
    if not r > 0:
        raise ValueError("radius must be positive")
    alpha = normalize_alpha(alpha)
    if alpha == 0.0:
        return sphere_area(m) * math.log(r)
    return sphere_area(m) * r**alpha / alpha


# --- kernels --------------------------------------------------------------------


def _cross(w: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return w[..., 0] * dy[..., 1] - w[..., 1] * dy[..., 0]


def _normal(dy: np.ndarray) -> np.ndarray:
    return np.stack([dy[..., 1], -dy[..., 0]], axis=-1)


def _radius(w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    r = np.hypot(w[..., 0], w[..., 1])
    zero = r == 0.0
    return np.where(zero, 1.0, r), zero


def _power_kernel(power: float):
    def kernel(w, dy):
        r, zero = _radius(w)
        return np.where(zero, 0.0, r**power * _cross(w, dy))

    return kernel


def _log_over_square_kernel(w, dy):
    r, zero = _radius(w)
    return np.where(zero, 0.0, np.log(r) / r**2 * _cross(w, dy))


def _log_potential_kernel(w, dy):
    r, zero = _radius(w)
    return np.where(zero, 0.0, -0.5 * (np.log(r) - 0.5) * _cross(w, dy))


def _gradient_kernel(power: float):
    def kernel(w, dy):
        r, zero = _radius(w)
        return np.where(zero[..., None], 0.0, -(r**power)[..., None] * _normal(dy))

    return kernel


def _log_gradient_kernel(w, dy):
    r, zero = _radius(w)
    return np.where(zero[..., None], 0.0, np.log(r)[..., None] * _normal(dy))


def _second_partial_kernel(alpha: float, j: int):
    def kernel(w, dy):
        r, zero = _radius(w)
        return np.where(zero, 0.0, (alpha - 2) * r ** (alpha - 4) * w[..., j] * _normal(dy)[..., j])

    return kernel


# --- helpers -----------------------------------------------------------------------


def _locate(body: Body, x: Sequence[float]) -> Tuple[np.ndarray, int, float]:
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise ValueError(f"Expected a finite planar point, got {x!r}")
    label = int(classify_points(body, p[None])[0])
    return p, label, boundary_distance(body, p)


def _length_scale(body: Body, alpha: float, dist: float) -> float:
    """Scale that keeps r^(alpha-2)-type kernels inside floating-point range."""
    if alpha > 0 or dist <= 0:
        return body.diameter
    return dist


def _quad(quad: Optional[QuadratureSpec]) -> QuadratureSpec:
    return quad or QuadratureSpec.from_settings()


# --- values --------------------------------------------------------------------------


def eval(body: Body, x: Sequence[float], alpha: float, quad: Optional[QuadratureSpec] = None) -> PotentialSample:
    """
    Evaluate V^(alpha) at x by contour quadrature.

    Raises:
        DomainError: If alpha <= 0 and x lies on the boundary.
        QuadratureError: If the adaptive quadrature does not converge.
    """
    alpha = normalize_alpha(alpha)
    p, label, dist = _locate(body, x)
    regime = classify_regime(alpha)
    if alpha <= 0 and label == 0:
        raise DomainError("potential undefined on boundary")
    quad = _quad(quad)
    get_telemetry().count_evaluations(1, kind="value")

    if alpha == 0.0:
        total, error = contour_integral(body, p, _log_over_square_kernel, quad)
        value, quad_error = float(total[0]), error
    elif alpha == PLANE:
        # V^(m) is the area everywhere; the contour form is kept as a cross-check.
        total, error = contour_integral(body, p, _power_kernel(0.0), quad, scale=body.diameter)
        contour = 0.5 * body.diameter**2 * float(total[0])
        value = body.area
        quad_error = abs(contour - value) + 0.5 * body.diameter**2 * error
    else:
        scale = _length_scale(body, alpha, dist)
        total, error = contour_integral(body, p, _power_kernel(alpha - 2), quad, scale=scale)
        factor = scale**alpha / alpha
        value, quad_error = factor * float(total[0]), abs(factor) * error

    return PotentialSample(
        value=value,
        regime=regime,
        quad_error=quad_error,
        renormalized=alpha <= 0 and label == 1,
        alpha=alpha,
    )


def eval_log(body: Body, x: Sequence[float], quad: Optional[QuadratureSpec] = None) -> PotentialSample:
    """V^log(x) = integral of log(1/|x-y|) over the body; continuous across the boundary."""
    p, _, _ = _locate(body, x)
    get_telemetry().count_evaluations(1, kind="log")
    total, error = contour_integral(body, p, _log_potential_kernel, _quad(quad))
    return PotentialSample(
        value=float(total[0]),
        regime=Regime.AT_M,
        quad_error=error,
        renormalized=False,
        alpha=float(PLANE),
    )


def _profile_sum(rays: Sequence[RayCrossings], alpha: float) -> np.ndarray:
    sums = np.empty(len(rays))
    for k, ray in enumerate(rays):
        if not ray.entries:
            sums[k] = 0.0
            continue
        ts, signs = ray.ts, ray.signs
        sums[k] = np.sum(signs * np.log(ts)) if alpha == 0.0 else np.sum(signs * ts**alpha) / alpha
    return sums


def eval_radial(body: Body, x: Sequence[float], alpha: float, n_dirs: int = 512) -> PotentialSample:
    """
    V^(alpha) from signed ray crossings: the trapezoidal average over n_dirs
    directions of sum sgn * t^alpha / alpha (sum sgn * log t at alpha = 0),
    times 2 pi. The quadrature error is the change against every other direction.
    """
    alpha = normalize_alpha(alpha)
    p, label, _ = _locate(body, x)
    rays = radial_profile(body, p, n_dirs)
    sums = _profile_sum(rays, alpha)
    full = sphere_area(PLANE) * float(np.mean(sums))
    half = sphere_area(PLANE) * float(np.mean(sums[::2]))
    return PotentialSample(
        value=full,
        regime=classify_regime(alpha),
        quad_error=abs(full - half),
        renormalized=alpha <= 0 and label == 1,
        alpha=alpha,
    )


# --- derivatives ----------------------------------------------------------------------


def gradient(body: Body, x: Sequence[float], alpha: float, quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    """
    Gradient of V^(alpha).

    Raises:
        DomainError: If x is on the boundary and alpha <= 1.
    """
    alpha = normalize_alpha(alpha)
    p, label, dist = _locate(body, x)
    if label == 0 and alpha <= 1:
        raise DomainError(f"gradient of the potential is unbounded on the boundary for alpha={alpha}")
    get_telemetry().count_evaluations(1, kind="gradient")
    scale = _length_scale(body, alpha, dist)
    total, _ = contour_integral(body, p, _gradient_kernel(alpha - 2), _quad(quad), scale=scale)
    return scale ** (alpha - 1) * total


def log_gradient(body: Body, x: Sequence[float], quad: Optional[QuadratureSpec] = None) -> np.ndarray:
    p, _, _ = _locate(body, x)
    get_telemetry().count_evaluations(1, kind="log_gradient")
    total, _ = contour_integral(body, p, _log_gradient_kernel, _quad(quad))
    return total


def second_partial(
    body: Body, x: Sequence[float], alpha: float, j: int, quad: Optional[QuadratureSpec] = None
) -> float:
    """
    d^2 V^(alpha) / dx_j^2 for j in {0, 1}.

    At alpha = 2 the potential is the constant area, so the result is 0.

    Raises:
        DomainError: If x is on the boundary and alpha <= 2.
    """
    if j not in (0, 1):
        raise ValueError(f"coordinate index must be 0 or 1, got {j}")
    alpha = normalize_alpha(alpha)
    p, label, dist = _locate(body, x)
    if label == 0 and alpha <= 2:
        raise DomainError(f"second derivatives are undefined on the boundary for alpha={alpha}")
    if alpha == PLANE:
        return 0.0
    scale = _length_scale(body, alpha, dist)
    total, _ = contour_integral(body, p, _second_partial_kernel(alpha, j), _quad(quad), scale=scale)
    return float(scale ** (alpha - 2) * total[0])


def laplacian(
    body: Body, x: Sequence[float], alpha: float, quad: Optional[QuadratureSpec] = None
) -> LaplacianResult:
    """Laplacian as the sum of second partials, next to (alpha-2)^2 V^(alpha-2)."""
    alpha = normalize_alpha(alpha)
    value = sum(second_partial(body, x, alpha, j, quad) for j in (0, 1))
    if alpha == PLANE:
        identity = 0.0
    else:
        identity = (alpha - 2) * (alpha - PLANE) * eval(body, x, alpha - 2, quad).value
    discrepancy = abs(value - identity)
    if discrepancy > 1e-6 * max(abs(identity), 1e-300):
        logger.debug(f"Laplacian identity residual {discrepancy:.3e} at {tuple(x)}, alpha={alpha}")
    return LaplacianResult(value=value, identity=identity, discrepancy=discrepancy)


def hessian(
    body: Body,
    x: Sequence[float],
    alpha: float,
    quad: Optional[QuadratureSpec] = None,
    h: Optional[float] = None,
) -> np.ndarray:
    """Symmetrised central differences of the analytic gradient (step 1e-5 * diameter)."""
    p = np.asarray(x, dtype=float)
    h = h if h is not None else 1e-5 * body.diameter
    columns = []
    for j in (0, 1):
        e = np.zeros(2)
        e[j] = h
        columns.append((gradient(body, p + e, alpha, quad) - gradient(body, p - e, alpha, quad)) / (2 * h))
    matrix = np.column_stack(columns)
    return 0.5 * (matrix + matrix.T)


def axis_curvature_profile(
    body: Body,
    alpha: float,
    points: Iterable[Sequence[float]],
    j: int = 0,
    quad: Optional[QuadratureSpec] = None,
) -> np.ndarray:
    return np.array([second_partial(body, p, alpha, j, quad) for p in points])


# --- star-shaped bodies -------------------------------------------------------------------


def _star_radii(body: Body, x: Sequence[float], n_dirs: int) -> np.ndarray:
    p, label, _ = _locate(body, x)
    if label != 1:
        raise NotStarShapedError(f"point {tuple(p)} is not interior to the body")
    rays = radial_profile(body, p, n_dirs)
    if any(len(ray.entries) != 1 or ray.entries[0][1] != 1 for ray in rays):
        raise NotStarShapedError(f"body is not star-shaped at {tuple(p)}")
    return np.array([ray.rho_sup for ray in rays])


def star_dual_check(body: Body, x: Sequence[float], alpha: float, n_dirs: int = 512) -> Tuple[float, float]:
    """
    Compare V^(alpha) at x with -V^(-alpha) of the star dual at x.

    The star dual has radial function 1/rho, so both sides are computed from
    the same radial profile by two different formulas.

    Raises:
        NotStarShapedError: If some ray from x leaves the body more than once.
    """
    alpha = normalize_alpha(alpha)
    rho = _star_radii(body, x, n_dirs)
    lhs = eval_radial(body, x, alpha, n_dirs).value
    rho_dual = 1.0 / rho
    if alpha == 0.0:
        dual = sphere_area(PLANE) * float(np.mean(np.log(rho_dual)))
    else:
        dual = sphere_area(PLANE) * float(np.mean(rho_dual ** (-alpha))) / (-alpha)
    return lhs, -dual


def dual_mixed_volume(body: Body, x: Sequence[float], alpha: float, n_dirs: int = 512) -> float:
    """Integral of rho^alpha over the unit circle; equals alpha * V^(alpha) for star-shaped bodies."""
    alpha = normalize_alpha(alpha)
    rho = _star_radii(body, x, n_dirs)
    return sphere_area(PLANE) * float(np.mean(rho**alpha))


def potential_field(
    body: Body, points: np.ndarray, alpha: float, quad: Optional[QuadratureSpec] = None
) -> List[Optional[PotentialSample]]:
    """Evaluate many points concurrently; points where the potential is undefined give None."""

    def one(point) -> Optional[PotentialSample]:
        try:
            return eval(body, point, alpha, quad)
        except DomainError:
            return None

    return map_ordered(one, [tuple(p) for p in np.asarray(points, dtype=float)])
