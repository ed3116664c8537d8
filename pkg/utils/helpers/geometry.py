"""
Planar body model and the geometric primitives shared by every other module.

A body is a list of oriented loops. Loops with orientation +1 add their
interior, loops with orientation -1 subtract it (holes, or the reversed
orientation of a subtracted body). Polygon vertices may be given in any
order; they are stored as given and traversed counter-clockwise internally.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist
from shapely import affinity
from shapely.errors import GEOSException
from shapely.geometry import LinearRing
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon
from shapely.geometry.base import BaseGeometry
from shapely.ops import unary_union

from utils.helpers.errors import BodyError, DomainError, RayGrazingError

Point = Tuple[float, float]

# Micro-rotations (radians) tried in order when a ray hits a vertex or grazes a circle.
RAY_PERTURBATIONS = (0.0, 1e-11, -1e-11, 4e-11, -4e-11, 1e-10, -1e-10)
BOUNDARY_RTOL = 1e-9
CAP_AREA_RTOL = 1e-9
ARC_QUAD_SEGMENTS = 64


class PointClass(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def _as_point(x: Sequence[float]) -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise ValueError(f"Expected a finite planar point, got {x!r}")
    return p


def _unit(v: Sequence[float]) -> np.ndarray:
    u = _as_point(v)
    norm = math.hypot(u[0], u[1])
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"Direction {tuple(u)} is not a unit vector (norm {norm})")
    return u


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def rotate(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


@dataclass(frozen=True)
class PolygonLoop:
    vertices: Tuple[Point, ...]
    orientation: int = 1

    def __post_init__(self):
        vertices = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        if self.orientation not in (1, -1):
            raise BodyError(f"Loop orientation must be +1 or -1, got {self.orientation}")
        if len(vertices) < 3:
            raise BodyError("A polygonal loop needs at least 3 vertices")
        if not all(math.isfinite(c) for vertex in vertices for c in vertex):
            raise BodyError("Polygon vertices must be finite")
        if not LinearRing(vertices).is_simple:
            raise BodyError("Polygonal loop is self-intersecting")
        if abs(self.raw_area) <= 0.0:
            raise BodyError("Polygonal loop encloses no area")

    @property
    def kind(self) -> str:
        return "polygon"

    @cached_property
    def raw_area(self) -> float:
        v = np.asarray(self.vertices)
        return 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))

    @cached_property
    def ccw(self) -> np.ndarray:
        """Vertices in counter-clockwise order (read-only array)."""
        v = np.asarray(self.vertices, dtype=float)
        if self.raw_area < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        return v

    @property
    def area(self) -> float:
        return abs(self.raw_area)

    @property
    def centroid(self) -> np.ndarray:
        v = self.ccw
        w = np.roll(v, -1, axis=0)
        c = _cross(v, w)
        return np.array([np.sum((v[:, 0] + w[:, 0]) * c), np.sum((v[:, 1] + w[:, 1]) * c)]) / (
            6.0 * self.area
        )


@dataclass(frozen=True)
class CircleLoop:
    center: Point
    radius: float
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "radius", float(self.radius))
        if self.orientation not in (1, -1):
            raise BodyError(f"Loop orientation must be +1 or -1, got {self.orientation}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise BodyError(f"Circle radius must be positive, got {self.radius}")
        if not all(math.isfinite(c) for c in self.center):
            raise BodyError("Circle center must be finite")

    @property
    def kind(self) -> str:
        return "circle"

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def centroid(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)


Loop = Union[PolygonLoop, CircleLoop]


@dataclass(frozen=True)
class Edges:
    """Counter-clockwise boundary segments a -> a + d with the loop orientation."""

    start: np.ndarray
    direction: np.ndarray
    orientation: np.ndarray


@dataclass(frozen=True)
class Circles:
    center: np.ndarray
    radius: np.ndarray
    orientation: np.ndarray


@dataclass(frozen=True)
class Body:
    loops: Tuple[Loop, ...]
    dimension: int = 2

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(self.loops))
        if self.dimension != 2:
            raise BodyError(f"Only planar bodies are supported (dimension {self.dimension})")
        if not self.loops:
            raise BodyError("A body needs at least one loop")
        if not any(loop.orientation == 1 for loop in self.loops):
            raise BodyError("A body needs at least one loop with orientation +1")
        if self.area <= 0:
            raise BodyError("Body has empty interior (total signed area is not positive)")

    # --- cached derived data -------------------------------------------------

    @cached_property
    def edges(self) -> Edges:
        starts, directions, signs = [], [], []
        for loop in self.loops:
            if isinstance(loop, PolygonLoop):
                v = loop.ccw
                starts.append(v)
                directions.append(np.roll(v, -1, axis=0) - v)
                signs.append(np.full(len(v), loop.orientation, dtype=float))
        if not starts:
            empty = np.zeros((0, 2))
            return Edges(empty, empty, np.zeros(0))
        return Edges(np.vstack(starts), np.vstack(directions), np.concatenate(signs))

    @cached_property
    def circles(self) -> Circles:
        loops = [loop for loop in self.loops if isinstance(loop, CircleLoop)]
        if not loops:
            return Circles(np.zeros((0, 2)), np.zeros(0), np.zeros(0))
        return Circles(
            np.array([loop.center for loop in loops], dtype=float),
            np.array([loop.radius for loop in loops], dtype=float),
            np.array([loop.orientation for loop in loops], dtype=float),
        )

    @cached_property
    def area(self) -> float:
        return float(sum(loop.orientation * loop.area for loop in self.loops))

    @cached_property
    def centroid(self) -> np.ndarray:
        moment = sum(loop.orientation * loop.area * loop.centroid for loop in self.loops)
        return np.asarray(moment, dtype=float) / self.area

    @cached_property
    def diameter(self) -> float:
        """Exact diameter of the +1 loops (vertex pairs, vertex-circle and circle-circle pairs)."""
        vertices = np.vstack(
            [loop.ccw for loop in self.loops if isinstance(loop, PolygonLoop) and loop.orientation == 1]
            or [np.zeros((0, 2))]
        )
        circles = [loop for loop in self.loops if isinstance(loop, CircleLoop) and loop.orientation == 1]
        best = float(pdist(vertices).max()) if len(vertices) > 1 else 0.0
        for i, circle in enumerate(circles):
            c = np.asarray(circle.center)
            if len(vertices):
                best = max(best, float(np.max(np.hypot(*(vertices - c).T))) + circle.radius)
            for other in circles[i:]:
                best = max(
                    best,
                    math.dist(circle.center, other.center) + circle.radius + other.radius,
                )
        return best

    @cached_property
    def boundary_tol(self) -> float:
        return BOUNDARY_RTOL * self.diameter

    @cached_property
    def shape(self) -> BaseGeometry:
        return to_shapely(self)

    @cached_property
    def arc_area_defect(self) -> float:
        """Area lost by replacing every circle with its inscribed polygon in `shape`."""
        n = 4 * ARC_QUAD_SEGMENTS
        return float(
            sum(
                loop.area - 0.5 * n * loop.radius**2 * math.sin(2 * math.pi / n)
                for loop in self.loops
                if isinstance(loop, CircleLoop)
            )
        )

    @cached_property
    def boundary_points(self) -> np.ndarray:
        return boundary_sample(self, self.diameter / 512.0)


# --- constructors -------------------------------------------------------------


def polygon_body(vertices: Sequence[Sequence[float]]) -> Body:
    return Body((PolygonLoop(tuple(map(tuple, vertices))),))


def disk_body(center: Sequence[float] = (0.0, 0.0), radius: float = 1.0) -> Body:
    return Body((CircleLoop(tuple(center), radius),))


def annulus_body(center: Sequence[float], outer: float, inner: float) -> Body:
    if not 0 < inner < outer:
        raise BodyError("Annulus radii must satisfy 0 < inner < outer")
    return Body((CircleLoop(tuple(center), outer, 1), CircleLoop(tuple(center), inner, -1)))


def rectangle_body(width: float, height: float, origin: Sequence[float] = (0.0, 0.0)) -> Body:
    x0, y0 = origin
    return polygon_body([(x0, y0), (x0 + width, y0), (x0 + width, y0 + height), (x0, y0 + height)])


def regular_polygon_body(n: int, radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> Body:
    angles = 2 * np.pi * np.arange(n) / n + np.pi / 2
    return polygon_body(np.column_stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)]))


def to_shapely(body: Body, quad_segs: int = ARC_QUAD_SEGMENTS) -> BaseGeometry:
    """
    Convert a body to a shapely geometry: union of the +1 loops minus the -1 loops.

    Circles become inscribed polygons with 4*quad_segs vertices.
    """

    def loop_shape(loop: Loop) -> BaseGeometry:
        if isinstance(loop, PolygonLoop):
            return Polygon(loop.ccw)
        return ShapelyPoint(loop.center).buffer(loop.radius, quad_segs=quad_segs)

    positive = unary_union([loop_shape(loop) for loop in body.loops if loop.orientation == 1])
    negative = [loop_shape(loop) for loop in body.loops if loop.orientation == -1]
    if negative:
        positive = positive.difference(unary_union(negative))
    return positive


def transformed(
    body: Body,
    angle: float = 0.0,
    translation: Sequence[float] = (0.0, 0.0),
    scale: float = 1.0,
) -> Body:
    """Apply x -> scale * R(angle) x + translation to every loop."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    t = np.asarray(translation, dtype=float)

    def move(p: Sequence[float]) -> Tuple[float, float]:
        q = scale * rotate(np.asarray(p, dtype=float), angle) + t
        return float(q[0]), float(q[1])

    loops: List[Loop] = []
    for loop in body.loops:
        if isinstance(loop, PolygonLoop):
            loops.append(PolygonLoop(tuple(move(p) for p in loop.vertices), loop.orientation))
        else:
            loops.append(CircleLoop(move(loop.center), scale * loop.radius, loop.orientation))
    return Body(tuple(loops), body.dimension)


# --- bounding data --------------------------------------------------------------


def bounding_box(body: Body) -> Tuple[float, float, float, float]:
    xs, ys = [], []
    for loop in body.loops:
        if loop.orientation != 1:
            continue
        if isinstance(loop, PolygonLoop):
            xs += [loop.ccw[:, 0].min(), loop.ccw[:, 0].max()]
            ys += [loop.ccw[:, 1].min(), loop.ccw[:, 1].max()]
        else:
            xs += [loop.center[0] - loop.radius, loop.center[0] + loop.radius]
            ys += [loop.center[1] - loop.radius, loop.center[1] + loop.radius]
    return float(min(xs)), float(min(ys)), float(max(xs)), float(max(ys))


def support_value(body: Body, v: Sequence[float]) -> float:
    """M_v = max of x.v over the body, from polygon vertices and circle extremal points."""
    u = _unit(v)
    best = -math.inf
    for loop in body.loops:
        if loop.orientation != 1:
            continue
        if isinstance(loop, PolygonLoop):
            best = max(best, float(np.max(loop.ccw @ u)))
        else:
            best = max(best, float(np.dot(loop.center, u)) + loop.radius)
    return best


def boundary_sample(body: Body, spacing: float, arc_points: int = 1024) -> np.ndarray:
    """Vertices, points along every edge at most `spacing` apart, and points on every circle."""
    chunks = []
    edges = body.edges
    for a, d in zip(edges.start, edges.direction):
        n = max(8, int(math.ceil(math.hypot(*d) / spacing)))
        t = np.arange(n) / n
        chunks.append(a + t[:, None] * d)
    for c, r in zip(body.circles.center, body.circles.radius):
        theta = 2 * np.pi * np.arange(arc_points) / arc_points
        chunks.append(c + r * np.column_stack([np.cos(theta), np.sin(theta)]))
    return np.vstack(chunks)


# --- classification and distance -----------------------------------------------


def _winding_indicator(body: Body, points: np.ndarray) -> np.ndarray:
    """Signed count of loops containing each point (orientation-weighted)."""
    total = np.zeros(len(points))
    px = points[:, 0][:, None]
    py = points[:, 1][:, None]
    for loop in body.loops:
        if isinstance(loop, PolygonLoop):
            a = loop.ccw
            b = np.roll(a, -1, axis=0)
            straddle = (a[:, 1][None, :] > py) != (b[:, 1][None, :] > py)
            with np.errstate(divide="ignore", invalid="ignore"):
                x_cross = a[:, 0] + (py - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
            inside = np.count_nonzero(straddle & (px < x_cross), axis=1) % 2 == 1
        else:
            c = np.asarray(loop.center)
            inside = np.hypot(points[:, 0] - c[0], points[:, 1] - c[1]) < loop.radius
        total += loop.orientation * inside
    return total


def boundary_distances(body: Body, points: np.ndarray) -> np.ndarray:
    """Exact distance from each point to the boundary (all loops)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    best = np.full(len(points), np.inf)
    edges = body.edges
    if len(edges.start):
        w = points[:, None, :] - edges.start[None, :, :]
        dd = np.sum(edges.direction**2, axis=1)
        t = np.clip(np.sum(w * edges.direction[None], axis=2) / dd, 0.0, 1.0)
        gap = w - t[..., None] * edges.direction[None]
        best = np.minimum(best, np.min(np.hypot(gap[..., 0], gap[..., 1]), axis=1))
    circles = body.circles
    if len(circles.radius):
        rel = points[:, None, :] - circles.center[None]
        gap = np.abs(np.hypot(rel[..., 0], rel[..., 1]) - circles.radius[None])
        best = np.minimum(best, np.min(gap, axis=1))
    return best


def boundary_distance(body: Body, x: Sequence[float]) -> float:
    return float(boundary_distances(body, _as_point(x)[None])[0])


def classify_points(body: Body, points: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Classify many points at once.

    Returns:
        np.ndarray: +1 interior, 0 boundary (within tol), -1 exterior.
    """
    tol = body.boundary_tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.where(_winding_indicator(body, points) > 0, 1, -1)
    labels[boundary_distances(body, points) <= tol] = 0
    return labels


def classify_point(body: Body, x: Sequence[float], tol: Optional[float] = None) -> PointClass:
    label = int(classify_points(body, _as_point(x)[None], tol)[0])
    return {1: PointClass.INTERIOR, 0: PointClass.BOUNDARY, -1: PointClass.EXTERIOR}[label]


def nearest_boundary_points(body: Body, x: Sequence[float], tol: float = 1e-6) -> List[np.ndarray]:
    """
    Boundary points realising dist(x, boundary) up to `tol`, one per distinct location.

    A point with two or more entries lies on the medial axis.
    """
    p = _as_point(x)
    candidates: List[Tuple[float, np.ndarray]] = []
    edges = body.edges
    for a, d in zip(edges.start, edges.direction):
        t = min(1.0, max(0.0, float(np.dot(p - a, d) / np.dot(d, d))))
        q = a + t * d
        candidates.append((float(np.linalg.norm(p - q)), q))
    for c, r in zip(body.circles.center, body.circles.radius):
        rel = p - c
        norm = float(np.linalg.norm(rel))
        if norm <= tol:
            for angle in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
                candidates.append((r, c + r * np.array([math.cos(angle), math.sin(angle)])))
        else:
            candidates.append((abs(norm - r), c + r * rel / norm))
    best = min(dist for dist, _ in candidates)
    nearest: List[np.ndarray] = []
    for dist, q in sorted(candidates, key=lambda item: item[0]):
        if dist <= best + tol and all(np.linalg.norm(q - other) > tol for other in nearest):
            nearest.append(q)
    return nearest


# --- rays -------------------------------------------------------------------------


@dataclass(frozen=True)
class RayCrossings:
    entries: Tuple[Tuple[float, int], ...]
    rho_sup: float
    rho_inf: float
    direction: Tuple[float, float]
    perturbation: float = 0.0

    @property
    def ts(self) -> np.ndarray:
        return np.array([t for t, _ in self.entries])

    @property
    def signs(self) -> np.ndarray:
        return np.array([s for _, s in self.entries])


def _ray_hits(body: Body, x: np.ndarray, directions: np.ndarray):
    """
    Intersect rays x + t*u (t > 0) with every loop.

    Returns per direction the hit parameters, their signs (+1 leaving the body)
    and a flag marking vertex hits, collinear edges and tangencies.
    """
    n = len(directions)
    ts: List[np.ndarray] = []
    signs: List[np.ndarray] = []
    degenerate = np.zeros(n, dtype=bool)
    scale = max(body.diameter, 1e-300)

    edges = body.edges
    if len(edges.start):
        d = edges.direction
        w = edges.start - x
        length = np.hypot(d[:, 0], d[:, 1])
        denom = _cross(directions[:, None, :], d[None, :, :])
        w_cross_d = _cross(w, d)
        w_cross_u = _cross(w[None, :, :], directions[:, None, :])
        parallel = np.abs(denom) <= 1e-14 * length[None]
        safe = np.where(parallel, 1.0, denom)
        t = w_cross_d[None] / safe
        s = w_cross_u / safe
        s_eps = 1e-13
        hit = ~parallel & (t > 0) & (s >= -s_eps) & (s <= 1 + s_eps)
        at_vertex = hit & ((np.abs(s) <= s_eps) | (np.abs(s - 1) <= s_eps))
        # A collinear edge ahead of the origin is a degenerate hit.
        along = np.stack([np.sum(w * dir_, axis=-1) for dir_ in directions])
        ahead = np.maximum(along, along + np.einsum("kj,nj->nk", d, directions)) > 0
        collinear = parallel & (np.abs(w_cross_u) <= 1e-12 * scale) & ahead
        degenerate |= np.any(at_vertex | collinear, axis=1)
        edge_sign = edges.orientation[None] * np.sign(denom)
        ts.append(np.where(hit, t, np.nan))
        signs.append(np.where(hit, edge_sign, 0.0))

    circles = body.circles
    if len(circles.radius):
        f = x - circles.center
        bq = directions @ f.T
        cq = np.sum(f**2, axis=1) - circles.radius**2
        disc = bq**2 - cq[None]
        r2 = circles.radius[None] ** 2
        tangent = (np.abs(disc) <= 1e-12 * r2) & (-bq > 0)
        degenerate |= np.any(tangent, axis=1)
        root = np.sqrt(np.where(disc > 0, disc, 0.0))
        secant = disc > 1e-12 * r2
        t_in = -bq - root
        t_out = -bq + root
        ts.append(np.where(secant & (t_in > 0), t_in, np.nan))
        signs.append(np.where(secant & (t_in > 0), -circles.orientation[None], 0.0))
        ts.append(np.where(secant & (t_out > 0), t_out, np.nan))
        signs.append(np.where(secant & (t_out > 0), circles.orientation[None], 0.0))

    return np.hstack(ts), np.hstack(signs), degenerate


def _assemble(t_row: np.ndarray, s_row: np.ndarray, u: np.ndarray, delta: float) -> RayCrossings:
    keep = ~np.isnan(t_row)
    order = np.argsort(t_row[keep], kind="stable")
    t_sorted = t_row[keep][order]
    s_sorted = s_row[keep][order].astype(int)
    entries = tuple((float(t), int(s)) for t, s in zip(t_sorted, s_sorted))
    leaving = t_sorted[s_sorted > 0]
    rho_sup = float(leaving.max()) if len(leaving) else 0.0
    inside = int(np.sum(s_sorted)) > 0
    rho_inf = float(t_sorted[0]) if inside and len(t_sorted) else 0.0
    return RayCrossings(entries, rho_sup, rho_inf, (float(u[0]), float(u[1])), delta)


def ray_crossings(body: Body, x: Sequence[float], v: Sequence[float]) -> RayCrossings:
    """
    Signed transversal crossings of the half-line x + t*v with the boundary.

    Vertex hits and tangencies are resolved by deterministic micro-rotations
    of v (at most 1e-10 rad); the rotation used is recorded on the result.

    Raises:
        DomainError: If x lies on the boundary.
        RayGrazingError: If every rotation in the budget is still degenerate.
    """
    p = _as_point(x)
    u = _unit(v)
    if boundary_distance(body, p) <= body.boundary_tol:
        raise DomainError("ray origin lies on the boundary")
    for delta in RAY_PERTURBATIONS:
        w = rotate(u, delta) if delta else u
        t, s, degenerate = _ray_hits(body, p, w[None])
        if not degenerate[0]:
            return _assemble(t[0], s[0], w, delta)
    raise RayGrazingError(
        f"ray from {tuple(p)} along {tuple(u)} grazes the boundary for every perturbation",
        direction=(float(u[0]), float(u[1])),
    )


def radial_profile(body: Body, x: Sequence[float], n_dirs: int) -> List[RayCrossings]:
    """One RayCrossings per direction v_k = (cos 2pi k/n, sin 2pi k/n)."""
    if n_dirs < 16:
        raise ValueError("radial_profile needs at least 16 directions")
    p = _as_point(x)
    if boundary_distance(body, p) <= body.boundary_tol:
        raise DomainError("ray origin lies on the boundary")
    angles = 2 * np.pi * np.arange(n_dirs) / n_dirs
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    t, s, degenerate = _ray_hits(body, p, directions)
    profile = []
    for k in range(n_dirs):
        if degenerate[k]:
            profile.append(ray_crossings(body, p, directions[k] / np.linalg.norm(directions[k])))
        else:
            profile.append(_assemble(t[k], s[k], directions[k], 0.0))
    return profile


def is_star_shaped(body: Body, x: Sequence[float], n_dirs: int = 256) -> bool:
    """True when every sampled ray from x leaves the body exactly once and never re-enters."""
    return all(
        len(ray.entries) == 1 and ray.entries[0][1] == 1 for ray in radial_profile(body, x, n_dirs)
    )


# --- caps and reflections ----------------------------------------------------------


@dataclass(frozen=True)
class CapSpec:
    v: Tuple[float, float]
    b: float

    def __post_init__(self):
        u = _as_point(self.v)
        if abs(math.hypot(u[0], u[1]) - 1.0) > 1e-12:
            raise ValueError(f"Cap direction {self.v} is not a unit vector")
        object.__setattr__(self, "v", (float(u[0]), float(u[1])))
        object.__setattr__(self, "b", float(self.b))

    def reflect(self, points: np.ndarray) -> np.ndarray:
        v = np.asarray(self.v)
        offset = points @ v - self.b
        return points - 2.0 * offset[:, None] * v[None]


def _halfplane(body: Body, cap: CapSpec) -> Polygon:
    v = np.asarray(cap.v)
    n = np.array([-v[1], v[0]])
    xmin, ymin, xmax, ymax = bounding_box(body)
    reach = 4.0 * max(body.diameter, math.hypot(xmax, ymax), math.hypot(xmin, ymin), 1.0)
    base = cap.b * v
    corners = [base - reach * n, base + reach * n, base + reach * n + reach * v, base - reach * n + reach * v]
    return Polygon(corners)


def _area_verdict(body: Body, cap: CapSpec, tol: float) -> bool:
    try:
        piece = body.shape.intersection(_halfplane(body, cap))
        if piece.is_empty or piece.area == 0.0:
            return True
        v = np.asarray(cap.v)
        m = np.eye(2) - 2.0 * np.outer(v, v)
        shift = 2.0 * cap.b * v
        mirrored = affinity.affine_transform(piece, [m[0, 0], m[0, 1], m[1, 0], m[1, 1], shift[0], shift[1]])
        overflow = mirrored.difference(body.shape).area
    except GEOSException as e:
        raise BodyError(f"clipping degenerate for cap v={cap.v}, b={cap.b}: {e}") from e
    return overflow <= tol * body.area + 2.0 * body.arc_area_defect


def _sampled_verdict(body: Body, cap: CapSpec, tol_dist: float) -> bool:
    v = np.asarray(cap.v)
    points = body.boundary_points
    circles = body.circles
    if len(circles.radius):
        # Extremal circle points in the cap direction are where reflected arcs overflow first.
        perp = np.array([-v[1], v[0]])
        extra = [circles.center + sgn * circles.radius[:, None] * w for w in (v, perp) for sgn in (1, -1)]
        points = np.vstack([points, *extra])
    height = points @ v - cap.b
    margin = 1e-12 * body.diameter
    cap_side = points[height > margin]
    far_side = points[height < -margin]

    if len(cap_side):
        mirrored = cap.reflect(cap_side)
        outside = _winding_indicator(body, mirrored) <= 0
        if np.any(outside & (boundary_distances(body, mirrored) > tol_dist)):
            return False
    if len(far_side):
        # A boundary point strictly inside the reflected cap means the cap pokes out there.
        mirrored = cap.reflect(far_side)
        inside = _winding_indicator(body, mirrored) > 0
        if np.any(inside & (boundary_distances(body, mirrored) > tol_dist)):
            return False
    return True


def cap_reflection_contained(body: Body, cap: CapSpec, tol: float = CAP_AREA_RTOL) -> bool:
    """
    True iff the cap {x.v > b} of the body, reflected in the line x.v = b, lies in the body.

    The exact-clipping area test (area of reflected cap minus body at most
    tol * area) is paired with a check of the reflected boundary samples at
    distance tolerance tol * diameter, which resolves the fold offset linearly.
    """
    m_v = support_value(body, cap.v)
    if cap.b > m_v + body.boundary_tol:
        raise ValueError(f"cap offset {cap.b} exceeds the support value {m_v}")
    return _sampled_verdict(body, cap, tol * body.diameter) and _area_verdict(body, cap, tol)
