"""
Minimal unfolded region: the intersection of the halfplanes {x . v <= l_v}
where l_v is the largest offset whose cap reflects into the body.
"""

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist
from shapely.geometry import LineString
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon
from shapely.geometry.base import BaseGeometry
from shapely.ops import nearest_points

from utils.helpers.background import map_ordered
from utils.helpers.errors import SolverError
from utils.helpers.geometry import (
    Body,
    CapSpec,
    PolygonLoop,
    bounding_box,
    cap_reflection_contained,
    support_value,
)
from utils.helpers.logger import logger
from utils.helpers.settings import load_settings
from utils.helpers.telemetry import track_solve

SCAN_STEPS_PER_DIAMETER = 256
BISECTION_STEPS = 40
DEFAULT_CAP_TOL = 1e-9

Halfspace = Tuple[Tuple[float, float], float]


@dataclass(frozen=True)
class UnfoldedRegion:
    """Convex polygon {x : x.v <= l_v for every sampled v}."""

    halfspaces: Tuple[Halfspace, ...]
    polygon: Tuple[Tuple[float, float], ...]
    n_dirs: int
    slack: float

    @cached_property
    def shape(self) -> BaseGeometry:
        if len(self.polygon) == 1:
            return ShapelyPoint(self.polygon[0])
        if len(self.polygon) == 2:
            return LineString(self.polygon)
        return Polygon(self.polygon)

    @cached_property
    def dilated(self) -> BaseGeometry:
        return self.shape.buffer(self.slack)

    @property
    def vertices(self) -> np.ndarray:
        return np.asarray(self.polygon, dtype=float)

    @property
    def diameter(self) -> float:
        return float(pdist(self.vertices).max()) if len(self.polygon) > 1 else 0.0

    def contains(self, x: Sequence[float], slack: Optional[float] = None) -> bool:
        slack = self.slack if slack is None else slack
        p = np.asarray(x, dtype=float)
        return all(float(np.dot(v, p)) <= level + slack for v, level in self.halfspaces)

    def distance(self, x: Sequence[float]) -> float:
        return float(self.shape.distance(ShapelyPoint(x)))

    def project(self, x: Sequence[float]) -> np.ndarray:
        """Nearest point of the region dilated by `slack` (x itself when already inside)."""
        p = ShapelyPoint(x)
        if self.dilated.covers(p):
            return np.asarray(x, dtype=float)
        nearest, _ = nearest_points(self.dilated, p)
        return np.array([nearest.x, nearest.y])


def _unit_directions(angles: Sequence[float]) -> np.ndarray:
    return np.column_stack([np.cos(angles), np.sin(angles)])


def critical_directions(body: Body) -> np.ndarray:
    """
    Fold directions at which polygon caps fold exactly onto themselves:
    edge directions, edge normals and normals of the vertex angle bisectors.
    """
    angles: List[float] = []
    for loop in body.loops:
        if not isinstance(loop, PolygonLoop):
            continue
        v = loop.ccw
        d = np.roll(v, -1, axis=0) - v
        unit = d / np.linalg.norm(d, axis=1)[:, None]
        heading = np.arctan2(d[:, 1], d[:, 0])
        angles += list(heading) + list(heading + 0.5 * np.pi)
        # The bisector at vertex i runs between the outgoing edge and the reversed incoming edge.
        bisector = unit - np.roll(unit, 1, axis=0)
        ok = np.linalg.norm(bisector, axis=1) > 1e-12
        angles += list(np.arctan2(bisector[ok, 1], bisector[ok, 0]) + 0.5 * np.pi)
    angles = np.asarray(angles)
    both = np.concatenate([angles, angles + np.pi]) % (2 * np.pi)
    return _unit_directions(both) if len(both) else np.zeros((0, 2))


def sample_directions(body: Body, n_dirs: int) -> np.ndarray:
    base = _unit_directions(2 * np.pi * np.arange(n_dirs) / n_dirs)
    extra = critical_directions(body)
    if not len(extra):
        return base
    directions = np.vstack([base, extra])
    # Drop near-duplicates so equal lines are not bisected twice.
    angles = np.round(np.arctan2(directions[:, 1], directions[:, 0]) % (2 * np.pi), 12)
    _, first = np.unique(angles, return_index=True)
    directions = directions[np.sort(first)]
    return directions / np.linalg.norm(directions, axis=1)[:, None]


def maximal_cap_offset(body: Body, v: np.ndarray, tol: float = DEFAULT_CAP_TOL) -> float:
    """
    l_v: the lowest offset b such that every cap {x.v > b'} with b <= b' <= M_v
    folds into the body.

    Scans b down from M_v in steps of diameter/256 until the first failure and
    bisects the bracket. Returns the passing end of the bracket.
    """
    v = np.asarray(v, dtype=float)
    upper = support_value(body, v)
    lower = -support_value(body, -v)
    step = body.diameter / SCAN_STEPS_PER_DIAMETER

    def folds(b: float) -> bool:
        return cap_reflection_contained(body, CapSpec((float(v[0]), float(v[1])), b), tol)

    passing = upper
    while True:
        candidate = passing - step
        if candidate <= lower:
            return lower
        if not folds(candidate):
            failing = candidate
            break
        passing = candidate

    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (passing + failing)
        if folds(mid):
            passing = mid
        else:
            failing = mid
    return passing


def clip_halfplane(polygon: List[Tuple[float, float]], v: np.ndarray, level: float) -> List[Tuple[float, float]]:
    """Keep the part of a convex polygon with x.v <= level (Sutherland-Hodgman pass)."""
    if not polygon:
        return []

    def height(p):
        return p[0] * v[0] + p[1] * v[1] - level

    out: List[Tuple[float, float]] = []
    prev = polygon[-1]
    prev_h = height(prev)
    for cur in polygon:
        cur_h = height(cur)
        if cur_h <= 0:
            if prev_h > 0:
                t = prev_h / (prev_h - cur_h)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
            out.append(cur)
        elif prev_h <= 0:
            t = prev_h / (prev_h - cur_h)
            out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        prev, prev_h = cur, cur_h
    return out


def _merge_close(polygon: List[Tuple[float, float]], radius: float) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for p in polygon:
        if not merged or math.dist(p, merged[-1]) > radius:
            merged.append(p)
    while len(merged) > 1 and math.dist(merged[0], merged[-1]) <= radius:
        merged.pop()
    if len(merged) == 2 and math.dist(*merged) <= radius:
        merged = merged[:1]
    return merged


def intersect_halfspaces(
    body: Body, halfspaces: Sequence[Halfspace], slack: float
) -> List[Tuple[float, float]]:
    xmin, ymin, xmax, ymax = bounding_box(body)
    pad = body.diameter
    polygon = [(xmin - pad, ymin - pad), (xmax + pad, ymin - pad), (xmax + pad, ymax + pad), (xmin - pad, ymax + pad)]
    for v, level in halfspaces:
        polygon = clip_halfplane(polygon, np.asarray(v), level + slack)
        if not polygon:
            break
    return polygon


@lru_cache(maxsize=64)
def unfolded_region(body: Body, n_dirs: Optional[int] = None, tol: float = DEFAULT_CAP_TOL) -> UnfoldedRegion:
    """
    Build the minimal unfolded region of a body.

    Every halfplane is relaxed by 2 * tol * diameter, the offset resolution of
    the cap test, so that bodies whose region is a single point still produce
    a (tiny) nonempty polygon around it.

    Raises:
        SolverError: If the halfplane intersection is numerically empty.
    """
    n_dirs = n_dirs or load_settings().uf_dirs
    if n_dirs < 32:
        raise ValueError("unfolded_region needs at least 32 directions")
    directions = sample_directions(body, n_dirs)
    slack = 2.0 * tol * body.diameter + 1e-12 * body.diameter

    with track_solve("unfolded_region", n_dirs=n_dirs):
        logger.info(f"Computing unfolded region over {len(directions)} directions")
        levels = map_ordered(lambda v: maximal_cap_offset(body, v, tol), list(directions))
        halfspaces = tuple(((float(v[0]), float(v[1])), float(level)) for v, level in zip(directions, levels))
        polygon = intersect_halfspaces(body, halfspaces, slack)

    if not polygon:
        logger.error("Unfolded region is empty; the cap offsets are inconsistent")
        raise SolverError("unfolded region is empty (halfplane intersection has no points)")
    polygon = _merge_close(polygon, 10.0 * slack)
    logger.info(f"Unfolded region has {len(polygon)} vertices")
    return UnfoldedRegion(halfspaces=halfspaces, polygon=tuple(polygon), n_dirs=n_dirs, slack=slack)


def diameter_ratio(region: UnfoldedRegion, body: Body) -> float:
    return region.diameter / body.diameter
