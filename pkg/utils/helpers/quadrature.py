"""
Adaptive Gauss-Legendre quadrature of contour integrals along a body boundary.

Every boundary piece becomes a parametric panel y(t): straight edges use
y = a + t*d on [0, 1], circles use y = c + r(cos t, sin t) on angle ranges.
Panels close to the evaluation point are pre-graded geometrically toward the
nearest boundary point, then refined by bisection wherever the two-half
estimate disagrees with the whole-panel estimate.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from utils.helpers.errors import ConfigurationError, QuadratureError
from utils.helpers.geometry import Body
from utils.helpers.logger import logger
from utils.helpers.settings import load_settings

# kernel(w, dy) -> (..., k) where w = y - x and dy = y'(t) (both already divided by the length scale)
Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]

NEAR_BOUNDARY_RTOL = 1e-3
ON_PANEL_RTOL = 1e-14


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_segment: int = 16
    adaptive_depth: int = 12
    target_rel_err: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_segment < 4:
            raise ConfigurationError("nodes_per_segment must be at least 4")
        if self.adaptive_depth < 0:
            raise ConfigurationError("adaptive_depth must be non-negative")
        if not self.target_rel_err > 0:
            raise ConfigurationError("target_rel_err must be positive")

    @classmethod
    def from_settings(cls) -> "QuadratureSpec":
        settings = load_settings()
        return cls(settings.quad_nodes, settings.quad_depth, settings.quad_rtol)


@lru_cache(maxsize=16)
def _gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass
class Panels:
    arc: np.ndarray
    base: np.ndarray
    vec: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    sign: np.ndarray
    depth: np.ndarray

    def __len__(self) -> int:
        return len(self.lo)

    def take(self, index: np.ndarray) -> "Panels":
        return Panels(
            self.arc[index],
            self.base[index],
            self.vec[index],
            self.lo[index],
            self.hi[index],
            self.sign[index],
            self.depth[index],
        )

    def evaluate(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Points y(t) and derivatives y'(t) for parameters t of shape (n, q)."""
        arc = self.arc[:, None, None]
        radius = self.vec[:, None, 0:1]
        ct, st = np.cos(t)[..., None], np.sin(t)[..., None]
        unit = np.concatenate([ct, st], axis=-1)
        tangent = np.concatenate([-st, ct], axis=-1)
        line_y = self.base[:, None, :] + t[..., None] * self.vec[:, None, :]
        arc_y = self.base[:, None, :] + radius * unit
        y = np.where(arc, arc_y, line_y)
        dy = np.where(arc, radius * tangent, np.broadcast_to(self.vec[:, None, :], y.shape))
        return y, dy


def _graded_breaks(t_star: float, delta: float, lo: float, hi: float) -> list:
    """Breakpoints t* and t* +- delta*2^k that fall strictly inside (lo, hi)."""
    breaks = []
    if lo < t_star < hi:
        breaks.append(t_star)
    step = delta
    while step < hi - lo:
        for candidate in (t_star - step, t_star + step):
            if lo < candidate < hi:
                breaks.append(candidate)
        step *= 2.0
    return sorted(set(breaks))


def build_panels(body: Body, x: np.ndarray) -> Panels:
    """
    Initial panels for a body, geometrically graded toward the point x.

    Grading is applied to every edge or quarter arc whose distance to x is
    below its own length or below 1e-3 * diameter.
    """
    near = NEAR_BOUNDARY_RTOL * body.diameter
    rows = []

    edges = body.edges
    for a, d, sign in zip(edges.start, edges.direction, edges.orientation):
        dd = float(np.dot(d, d))
        t_star = float(np.dot(x - a, d) / dd)
        closest = a + min(1.0, max(0.0, t_star)) * d
        dist = float(np.linalg.norm(x - closest))
        length = math.sqrt(dd)
        breaks = []
        if dist < max(length, near):
            delta = max(dist / length, ON_PANEL_RTOL)
            breaks = _graded_breaks(min(1.0, max(0.0, t_star)), delta, 0.0, 1.0)
        knots = [0.0, *breaks, 1.0]
        for lo, hi in zip(knots[:-1], knots[1:]):
            rows.append((False, a, d, lo, hi, sign))

    circles = body.circles
    for c, r, sign in zip(circles.center, circles.radius, circles.orientation):
        rel = x - c
        theta = math.atan2(rel[1], rel[0]) % (2 * math.pi)
        dist = abs(math.hypot(rel[0], rel[1]) - r)
        vec = np.array([r, 0.0])
        quarter = 0.5 * math.pi
        for k in range(4):
            lo, hi = k * quarter, (k + 1) * quarter
            breaks = []
            if dist < max(r * quarter, near):
                delta = max(dist / r, ON_PANEL_RTOL * 2 * math.pi)
                for t_star in (theta - 2 * math.pi, theta, theta + 2 * math.pi):
                    breaks += _graded_breaks(t_star, delta, lo, hi)
            knots = [lo, *sorted(set(breaks)), hi]
            for a_lo, a_hi in zip(knots[:-1], knots[1:]):
                rows.append((True, c, vec, a_lo, a_hi, sign))

    return Panels(
        arc=np.array([row[0] for row in rows], dtype=bool),
        base=np.array([row[1] for row in rows], dtype=float).reshape(-1, 2),
        vec=np.array([row[2] for row in rows], dtype=float).reshape(-1, 2),
        lo=np.array([row[3] for row in rows], dtype=float),
        hi=np.array([row[4] for row in rows], dtype=float),
        sign=np.array([row[5] for row in rows], dtype=float),
        depth=np.zeros(len(rows), dtype=int),
    )


def _panel_integrals(
    panels: Panels, lo: np.ndarray, hi: np.ndarray, x: np.ndarray, kernel: Kernel, nodes: int, scale: float
) -> np.ndarray:
    gl_nodes, gl_weights = _gauss_legendre(nodes)
    half = 0.5 * (hi - lo)
    t = 0.5 * (hi + lo)[:, None] + half[:, None] * gl_nodes[None, :]
    y, dy = panels.evaluate(t)
    w = (y - x) / scale
    values = kernel(w, dy / scale)
    if values.ndim == 2:
        values = values[..., None]
    return panels.sign[:, None] * np.einsum("q,nqk->nk", gl_weights, values) * half[:, None]


def contour_integral(
    body: Body,
    x,
    kernel: Kernel,
    spec: Optional[QuadratureSpec] = None,
    scale: float = 1.0,
) -> Tuple[np.ndarray, float]:
    """
    Integrate `kernel` around the oriented boundary of `body`.

    The error estimate is the summed |two halves - whole| per panel. Refinement
    stops once it falls below spec.target_rel_err times the summed magnitude
    of the panel contributions, which is an absolute floor whenever the total
    itself cancels to (nearly) zero.

    Args:
        body: The body.
        x: Evaluation point.
        kernel: Integrand kernel(w, dy) evaluated on (panel, node) arrays.
        spec: Quadrature settings. Defaults to the configured QuadratureSpec.
        scale: Length scale dividing w and dy before the kernel is applied.

    Returns:
        Tuple[np.ndarray, float]: (integral per kernel component, error estimate)

    Raises:
        QuadratureError: If the target is not met within the depth budget.
    """
    spec = spec or QuadratureSpec.from_settings()
    x = np.asarray(x, dtype=float)
    panels = build_panels(body, x)
    n = spec.nodes_per_segment

    coarse = _panel_integrals(panels, panels.lo, panels.hi, x, kernel, n, scale)
    mid = 0.5 * (panels.lo + panels.hi)
    left = _panel_integrals(panels, panels.lo, mid, x, kernel, n, scale)
    right = _panel_integrals(panels, mid, panels.hi, x, kernel, n, scale)

    done_total = np.zeros(coarse.shape[1])
    done_error = 0.0
    done_magnitude = 0.0
    max_rounds = 4 * spec.adaptive_depth + 8

    for _ in range(max_rounds):
        fine = left + right
        err = np.sum(np.abs(fine - coarse), axis=1)
        total = done_total + fine.sum(axis=0)
        magnitude = done_magnitude + float(np.sum(np.abs(fine)))
        error = done_error + float(err.sum())
        target = spec.target_rel_err * magnitude
        if not np.all(np.isfinite(total)) or not math.isfinite(error):
            raise QuadratureError("non-finite contour integrand", achieved_error=math.inf)
        if error <= target:
            return total, error

        split = (err > target / max(len(panels), 1)) & (panels.depth < spec.adaptive_depth)
        if not np.any(split):
            break
        # Panels that are good enough (or out of depth) are frozen.
        keep = ~split
        done_total = done_total + fine[keep].sum(axis=0)
        done_error += float(err[keep].sum())
        done_magnitude += float(np.sum(np.abs(fine[keep])))

        parent = panels.take(split)
        p_mid = 0.5 * (parent.lo + parent.hi)
        depth = parent.depth + 1
        children = Panels(
            arc=np.concatenate([parent.arc, parent.arc]),
            base=np.concatenate([parent.base, parent.base]),
            vec=np.concatenate([parent.vec, parent.vec]),
            lo=np.concatenate([parent.lo, p_mid]),
            hi=np.concatenate([p_mid, parent.hi]),
            sign=np.concatenate([parent.sign, parent.sign]),
            depth=np.concatenate([depth, depth]),
        )
        coarse = np.concatenate([left[split], right[split]])
        c_mid = 0.5 * (children.lo + children.hi)
        left = _panel_integrals(children, children.lo, c_mid, x, kernel, n, scale)
        right = _panel_integrals(children, c_mid, children.hi, x, kernel, n, scale)
        panels = children

    fine = left + right
    total = done_total + fine.sum(axis=0)
    error = done_error + float(np.sum(np.abs(fine - coarse)))
    magnitude = done_magnitude + float(np.sum(np.abs(fine)))
    if error <= spec.target_rel_err * magnitude:
        return total, error
    logger.debug(f"Contour quadrature stalled at error {error:.3e} (magnitude {magnitude:.3e})")
    raise QuadratureError(
        f"contour quadrature did not reach relative error {spec.target_rel_err:g} "
        f"(achieved {error / max(magnitude, 1e-300):.3e})",
        achieved_error=error,
    )
