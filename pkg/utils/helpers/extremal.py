"""Min-max and max-min points, Hausdorff distances and cevian ratios of triangles."""

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial.distance import cdist

from utils.helpers.errors import BodyError, DomainError, SolverError
from utils.helpers.geometry import (
    Body,
    CircleLoop,
    PolygonLoop,
    Point,
    boundary_distance,
    boundary_distances,
    bounding_box,
    classify_points,
)
from utils.helpers.logger import logger
from utils.helpers.settings import load_settings

CIRCLE_SAMPLES = 256


class BallKind(str, Enum):
    MINMAX = "minmax"
    MAXMIN = "maxmin"


@dataclass(frozen=True)
class ExtremalBall:
    center: Point
    radius: float
    kind: BallKind


# --- smallest enclosing circle ---------------------------------------------------


def _circle_two(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, float]:
    c = 0.5 * (a + b)
    return c, float(max(np.linalg.norm(a - c), np.linalg.norm(b - c)))


def _circumcircle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> Optional[Tuple[np.ndarray, float]]:
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    ux = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(max(np.linalg.norm(center - p) for p in (a, b, c)))


def _inside(circle: Optional[Tuple[np.ndarray, float]], p: np.ndarray) -> bool:
    return circle is not None and np.linalg.norm(p - circle[0]) <= circle[1] * (1 + 1e-14)


def _circle_with_two(points: Sequence[np.ndarray], p: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, float]:
    circle = _circle_two(p, q)
    left = right = None
    pq = q - p
    for r in points:
        if _inside(circle, r):
            continue
        cross = pq[0] * (r - p)[1] - pq[1] * (r - p)[0]
        candidate = _circumcircle(p, q, r)
        if candidate is None:
            continue
        side = pq[0] * (candidate[0] - p)[1] - pq[1] * (candidate[0] - p)[0]
        if cross > 0 and (left is None or side > pq[0] * (left[0] - p)[1] - pq[1] * (left[0] - p)[0]):
            left = candidate
        elif cross < 0 and (right is None or side < pq[0] * (right[0] - p)[1] - pq[1] * (right[0] - p)[0]):
            right = candidate
    if left is None and right is None:
        return circle
    if left is None:
        return right
    if right is None:
        return left
    return left if left[1] <= right[1] else right


def _circle_with_one(points: Sequence[np.ndarray], p: np.ndarray) -> Tuple[np.ndarray, float]:
    circle = (p, 0.0)
    for i, q in enumerate(points):
        if not _inside(circle, q):
            circle = _circle_two(p, q) if circle[1] == 0.0 else _circle_with_two(points[: i + 1], p, q)
    return circle


def enclosing_circle(points: np.ndarray, seed: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """Smallest circle containing all points (randomised incremental construction, seeded shuffle)."""
    shuffled = [np.asarray(p, dtype=float) for p in points]
    if not shuffled:
        raise ValueError("enclosing_circle needs at least one point")
    random.Random(load_settings().seed if seed is None else seed).shuffle(shuffled)
    circle: Optional[Tuple[np.ndarray, float]] = None
    for i, p in enumerate(shuffled):
        if circle is None or not _inside(circle, p):
            circle = _circle_with_one(shuffled[: i + 1], p)
    return circle


def _outer_points(body: Body) -> np.ndarray:
    chunks = []
    theta = 2 * np.pi * np.arange(CIRCLE_SAMPLES) / CIRCLE_SAMPLES
    for loop in body.loops:
        if loop.orientation != 1:
            continue
        if isinstance(loop, PolygonLoop):
            chunks.append(loop.ccw)
        else:
            chunks.append(np.asarray(loop.center) + loop.radius * np.column_stack([np.cos(theta), np.sin(theta)]))
    return np.vstack(chunks)


def farthest_distance(body: Body, x: Sequence[float]) -> float:
    """max |y - x| over the body (exact for polygons and circles)."""
    p = np.asarray(x, dtype=float)
    best = 0.0
    for loop in body.loops:
        if loop.orientation != 1:
            continue
        if isinstance(loop, PolygonLoop):
            best = max(best, float(np.max(np.linalg.norm(loop.ccw - p, axis=1))))
        else:
            best = max(best, math.dist(loop.center, p) + loop.radius)
    return best


def minmax_point(body: Body, seed: Optional[int] = None) -> ExtremalBall:
    """
    Center and radius of the smallest disk containing the body.

    Circles enter through 256 samples each; the reported radius is the exact
    farthest distance from the computed center, so the body is always enclosed.
    """
    center, _ = enclosing_circle(_outer_points(body), seed)
    radius = farthest_distance(body, center)
    return ExtremalBall((float(center[0]), float(center[1])), radius, BallKind.MINMAX)


# --- largest inscribed disks -----------------------------------------------------------


def _single_convex_polygon(body: Body) -> Optional[PolygonLoop]:
    if len(body.loops) != 1 or not isinstance(body.loops[0], PolygonLoop):
        return None
    loop = body.loops[0]
    v = loop.ccw
    d = np.roll(v, -1, axis=0) - v
    turns = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    return loop if np.all(turns >= -1e-12 * body.diameter**2) else None


def chebyshev_center(loop: PolygonLoop) -> Tuple[np.ndarray, float]:
    """
    Largest inscribed disk of a convex polygon by linear programming:
    maximise r subject to n_i . x + r <= n_i . a_i for every edge.
    """
    v = loop.ccw
    d = np.roll(v, -1, axis=0) - v
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / np.linalg.norm(d, axis=1)[:, None]
    offsets = np.sum(normals * v, axis=1)
    a_ub = np.column_stack([normals, np.ones(len(v))])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"Chebyshev center LP failed with status {res.status}: {res.message}")
    return np.asarray(res.x[:2]), float(res.x[2])


def maxmin_points(
    body: Body, grid_n: int = 128, value_tol: float = 1e-7, cluster_radius: float = 1e-3
) -> List[ExtremalBall]:
    """
    Centers of largest inscribed disks: every refined candidate whose radius is
    within value_tol * diameter of the best, merged within cluster_radius * diameter.

    Interior grid points with the largest boundary distance (spread at least four
    grid spacings apart) are refined by Nelder-Mead; convex polygons also
    contribute their exact LP center, which bounds every refined radius.

    Raises:
        SolverError: If a refined radius exceeds the LP optimum of a convex polygon.
    """
    if grid_n < 64:
        raise ValueError("maxmin_points needs grid_n >= 64")
    diam = body.diameter
    xmin, ymin, xmax, ymax = bounding_box(body)
    xs = np.linspace(xmin, xmax, grid_n + 2)[1:-1]
    ys = np.linspace(ymin, ymax, grid_n + 2)[1:-1]
    grid = np.array([(x, y) for y in ys for x in xs])
    grid = grid[classify_points(body, grid) == 1]
    dist = boundary_distances(body, grid)
    spacing = max(xs[1] - xs[0], ys[1] - ys[0])
    order = np.argsort(-dist, kind="stable")
    near = order[dist[order] >= dist[order[0]] - 2 * spacing][:2048]
    starts: List[np.ndarray] = []
    if len(near) > 1:
        # The two most distant near-optimal points seed the ends of a max-min segment.
        pair = np.unravel_index(np.argmax(cdist(grid[near], grid[near])), (len(near), len(near)))
        starts = [grid[near[pair[0]]], grid[near[pair[1]]]]
    for i in near:
        if all(np.linalg.norm(grid[i] - s) > 4 * spacing for s in starts):
            starts.append(grid[i])
        if len(starts) == 64:
            break

    def negative_distance(p: np.ndarray) -> float:
        if int(classify_points(body, p[None])[0]) != 1:
            return 0.0
        return -boundary_distance(body, p)

    candidates = []
    for start in starts:
        res = minimize(
            negative_distance,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-12 * diam, "fatol": 1e-14 * diam, "maxiter": 2000},
        )
        candidates.append((-float(res.fun), np.asarray(res.x)))

    convex = _single_convex_polygon(body)
    if convex is not None:
        lp_center, lp_radius = chebyshev_center(convex)
        best_grid = max(r for r, _ in candidates)
        if best_grid > lp_radius + value_tol * diam:
            raise SolverError(f"inscribed disk of radius {best_grid} exceeds the Chebyshev LP optimum {lp_radius}")
        if best_grid < lp_radius - spacing:
            logger.warning(f"Grid search reached radius {best_grid}, short of the Chebyshev LP radius {lp_radius}")
        candidates.append((boundary_distance(body, lp_center), lp_center))

    r0 = max(r for r, _ in candidates)
    keep = sorted(((r, p) for r, p in candidates if r >= r0 - value_tol * diam), key=lambda item: -item[0])
    clustered: List[Tuple[float, np.ndarray]] = []
    for r, p in keep:
        if all(np.linalg.norm(p - q) > cluster_radius * diam for _, q in clustered):
            clustered.append((r, p))
    return [ExtremalBall((float(p[0]), float(p[1])), r0, BallKind.MAXMIN) for _, p in clustered]


def extreme_points(balls: Sequence[ExtremalBall]) -> List[ExtremalBall]:
    """Reduce a set of max-min centers to its two most distant members (one if all coincide)."""
    if len(balls) < 2:
        return list(balls)
    centers = np.array([b.center for b in balls])
    dists = cdist(centers, centers)
    i, j = np.unravel_index(np.argmax(dists), dists.shape)
    if dists[i, j] == 0:
        return [balls[0]]
    return sorted([balls[i], balls[j]], key=lambda b: b.center)


def hausdorff(a: Sequence[Sequence[float]], b: Sequence[Sequence[float]]) -> float:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("hausdorff needs two nonempty point sets")
    d = cdist(a, b)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


# --- cevian ratios -----------------------------------------------------------------------


def _angle(u: np.ndarray, w: np.ndarray) -> float:
    return math.atan2(abs(u[0] * w[1] - u[1] * w[0]), float(np.dot(u, w)))


def shibata_ratios(triangle: Body, point: Sequence[float]) -> List[Tuple[float, float]]:
    """
    For each vertex A (with the other two B, C in cyclic order), the cevian
    through `point` = L meets BC at X; returns (angle ALB / angle ALC, |BX| / |CX|).

    Raises:
        BodyError: If the body is not a single triangle.
        DomainError: If L is not strictly inside or a cevian is degenerate.
    """
    if len(triangle.loops) != 1 or not isinstance(triangle.loops[0], PolygonLoop):
        raise BodyError("shibata_ratios needs a single triangle")
    vertices = np.asarray(triangle.loops[0].vertices, dtype=float)
    if len(vertices) != 3:
        raise BodyError("shibata_ratios needs a triangle (3 vertices)")
    l_point = np.asarray(point, dtype=float)
    if int(classify_points(triangle, l_point[None])[0]) != 1:
        raise DomainError(f"point {tuple(l_point)} is not strictly inside the triangle")

    pairs = []
    for k in range(3):
        a, b, c = vertices[k], vertices[(k + 1) % 3], vertices[(k + 2) % 3]
        direction = l_point - a
        edge = c - b
        denom = direction[0] * edge[1] - direction[1] * edge[0]
        if abs(denom) <= 1e-14 * triangle.diameter**2:
            raise DomainError("degenerate cevian")
        s = ((b - a)[0] * direction[1] - (b - a)[1] * direction[0]) / denom
        x = b + s * edge
        angle_b = _angle(a - l_point, b - l_point)
        angle_c = _angle(a - l_point, c - l_point)
        if angle_c == 0 or np.linalg.norm(c - x) == 0:
            raise DomainError("degenerate cevian")
        pairs.append((angle_b / angle_c, float(np.linalg.norm(b - x) / np.linalg.norm(c - x))))
    return pairs


def is_disk(body: Body) -> bool:
    return len(body.loops) == 1 and isinstance(body.loops[0], CircleLoop)
