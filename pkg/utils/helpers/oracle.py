"""
Brute-force ground truth for the contour formulas.

Nothing here touches the boundary quadrature: the defining area integrals
are summed directly, in polar cells centred at the evaluation point (exact
radial weights, supersampled boundary cells) or by Monte Carlo. Only point
classification and distance to the boundary are borrowed from geometry.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.helpers.background import map_ordered
from utils.helpers.centers import CenterOptions, find_centers
from utils.helpers.errors import (
    ConfigurationError,
    DomainError,
    OracleResolutionError,
    RieszError,
    UnsupportedAlphaError,
)
from utils.helpers.extremal import is_disk
from utils.helpers.geometry import (
    Body,
    boundary_distance,
    bounding_box,
    classify_points,
    disk_body,
)
from utils.helpers.logger import logger
from utils.helpers.potential import PLANE, eval, eval_ball, normalize_alpha, sphere_area
from utils.helpers.quadrature import QuadratureSpec
from utils.helpers.settings import load_settings
from utils.helpers.telemetry import track_solve

RINGS_PER_CHUNK = 32
COMPLEMENT_RADIUS = 2.0


class Rule(str, Enum):
    MIDPOINT = "midpoint"
    MONTE_CARLO = "montecarlo"


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 256
    rule: Rule = Rule.MIDPOINT
    seed: int = 42
    samples: int = 1_000_000
    batch: int = 10_000
    eps_fraction: float = 0.25
    tolerance: Optional[float] = None
    supersample: int = 8

    def __post_init__(self):
        if self.resolution < 64 and self.samples < 100_000:
            raise ConfigurationError("GridSpec needs resolution >= 64 or samples >= 1e5")
        if not 0 < self.eps_fraction < 1:
            raise ConfigurationError("eps_fraction must lie in (0, 1)")
        if self.batch < 1 or self.supersample < 1:
            raise ConfigurationError("batch and supersample must be positive")

    @classmethod
    def from_settings(cls, **overrides) -> "GridSpec":
        settings = load_settings()
        values = dict(
            resolution=settings.grid_resolution,
            seed=settings.seed,
            samples=settings.mc_samples,
            batch=settings.mc_batch,
        )
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class BruteForceValue:
    value: float
    error: float
    complement: Optional[float] = None
    complement_error: Optional[float] = None
    epsilon: Optional[float] = None


@dataclass(frozen=True)
class EnergyValue:
    value: float
    alpha: float
    stderr: float


@dataclass(frozen=True)
class ExtremalityRow:
    name: str
    value: float
    reference: float
    gap: float
    stderr: float
    holds: bool
    strict: bool


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    alpha: float
    point: Tuple[float, float]
    fast: float
    oracle: float
    tolerance: float
    passed: bool


# --- polar midpoint rule ----------------------------------------------------------------


def radial_weights(nodes: np.ndarray, alpha: float) -> np.ndarray:
    """Exact integrals of r^(alpha-1) over consecutive node intervals."""
    if alpha == 0.0:
        return np.log(nodes[1:] / nodes[:-1])
    return (nodes[1:] ** alpha - nodes[:-1] ** alpha) / alpha


def _radial_nodes(r_lo: float, r_hi: float, h: float) -> np.ndarray:
    fixed = h * np.arange(0, math.ceil(r_hi / h) + 1)
    inner = fixed[(fixed > r_lo) & (fixed < r_hi)]
    return np.concatenate([[r_lo], inner, [r_hi]])


def _inside(body: Body, points: np.ndarray) -> np.ndarray:
    return classify_points(body, points, tol=1e-15 * body.diameter) >= 0


def _ring_chunk(
    body: Body,
    x: np.ndarray,
    nodes: np.ndarray,
    n_theta: int,
    alpha: float,
    want_inside: bool,
    supersample: int,
) -> float:
    """Integral of r^(alpha-1) dr dtheta over the cells between `nodes` lying in (or outside) the body."""
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    d_theta = 2 * np.pi / n_theta
    weights = radial_weights(nodes, alpha)

    def polar(r: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.column_stack([x[0] + r * np.cos(t), x[1] + r * np.sin(t)])

    rr, tt = np.meshgrid(nodes, theta, indexing="ij")
    corners = _inside(body, polar(rr.ravel(), tt.ravel())).reshape(rr.shape)
    r_mid = 0.5 * (nodes[1:] + nodes[:-1])
    rm, tm = np.meshgrid(r_mid, theta + 0.5 * d_theta, indexing="ij")
    mids = _inside(body, polar(rm.ravel(), tm.ravel())).reshape(rm.shape)

    c00 = corners[:-1]
    c10 = corners[1:]
    c01 = np.roll(corners, -1, axis=1)[:-1]
    c11 = np.roll(corners, -1, axis=1)[1:]
    stack = np.stack([c00, c10, c01, c11, mids])
    full = np.all(stack, axis=0)
    empty = ~np.any(stack, axis=0)
    mixed = ~(full | empty)

    target = full if want_inside else empty
    total = float(np.sum(weights[:, None] * target) * d_theta)

    ks, js = np.nonzero(mixed)
    if len(ks):
        s = supersample
        frac = (np.arange(s) + 0.5) / s
        edges = np.arange(s + 1) / s
        lo, hi = nodes[ks], nodes[ks + 1]
        sub_nodes = lo[:, None] + (hi - lo)[:, None] * edges[None, :]
        if alpha == 0.0:
            sub_w = np.log(sub_nodes[:, 1:] / sub_nodes[:, :-1])
        else:
            sub_w = (sub_nodes[:, 1:] ** alpha - sub_nodes[:, :-1] ** alpha) / alpha
        sub_r = 0.5 * (sub_nodes[:, 1:] + sub_nodes[:, :-1])
        sub_t = theta[js][:, None] + d_theta * frac[None, :]
        r_all = np.repeat(sub_r[:, :, None], s, axis=2)
        t_all = np.repeat(sub_t[:, None, :], s, axis=1)
        hit = _inside(body, polar(r_all.ravel(), t_all.ravel())).reshape(r_all.shape)
        if not want_inside:
            hit = ~hit
        total += float(np.sum(sub_w[:, :, None] * hit) * d_theta / s)
    return total


def polar_integral(
    body: Body,
    x: np.ndarray,
    alpha: float,
    r_lo: float,
    r_hi: float,
    resolution: int,
    want_inside: bool = True,
    supersample: int = 8,
) -> float:
    """
    Integral of r^(alpha-2) over {r_lo < |y - x| < r_hi} intersected with the body (or its complement).

    Radial nodes sit at multiples of diameter/resolution with r_lo and r_hi inserted;
    there are 2*resolution angular cells.
    """
    h = body.diameter / resolution
    nodes = _radial_nodes(r_lo, r_hi, h)
    n_theta = 4 * math.ceil(resolution / 2)
    chunks = [nodes[i : i + RINGS_PER_CHUNK + 1] for i in range(0, len(nodes) - 1, RINGS_PER_CHUNK)]
    parts = map_ordered(
        lambda chunk: _ring_chunk(body, x, chunk, n_theta, alpha, want_inside, supersample),
        chunks,
    )
    return math.fsum(parts)


# --- Monte Carlo ---------------------------------------------------------------------------


def _sample_radius(rng: np.random.Generator, n: int, alpha: float, r_lo: float, r_hi: float) -> np.ndarray:
    u = rng.random(n)
    if alpha == 0.0:
        return r_lo * (r_hi / r_lo) ** u
    return (r_lo**alpha + u * (r_hi**alpha - r_lo**alpha)) ** (1.0 / alpha)


def mc_integral(
    body: Body,
    x: np.ndarray,
    alpha: float,
    r_lo: float,
    r_hi: float,
    grid: GridSpec,
    want_inside: bool = True,
) -> Tuple[float, float]:
    """Importance-sampled (r ~ r^(alpha-1)) estimate of the polar integral with its batch stderr."""
    mass = 2 * np.pi * float(radial_weights(np.array([max(r_lo, 0.0), r_hi]), alpha)[0])
    n_batches = max(2, math.ceil(grid.samples / grid.batch))
    seeds = np.random.SeedSequence(grid.seed).spawn(n_batches)

    def batch(seed: np.random.SeedSequence) -> float:
        rng = np.random.default_rng(seed)
        r = _sample_radius(rng, grid.batch, alpha, r_lo, r_hi)
        t = 2 * np.pi * rng.random(grid.batch)
        points = np.column_stack([x[0] + r * np.cos(t), x[1] + r * np.sin(t)])
        hit = _inside(body, points)
        return float(np.mean(hit if want_inside else ~hit))

    means = np.array(map_ordered(batch, seeds))
    return mass * float(means.mean()), mass * float(means.std(ddof=1)) / math.sqrt(n_batches)


# --- brute-force potential ------------------------------------------------------------------


def _reach(body: Body, x: np.ndarray) -> float:
    xmin, ymin, xmax, ymax = bounding_box(body)
    return max(math.hypot(cx - x[0], cy - x[1]) for cx in (xmin, xmax) for cy in (ymin, ymax)) * (1 + 1e-9)


def _integrate(
    body: Body, x: np.ndarray, alpha: float, r_lo: float, r_hi: float, grid: GridSpec, want_inside: bool
) -> Tuple[float, float]:
    if grid.rule is Rule.MONTE_CARLO:
        return mc_integral(body, x, alpha, r_lo, r_hi, grid, want_inside)
    fine = polar_integral(body, x, alpha, r_lo, r_hi, grid.resolution, want_inside, grid.supersample)
    coarse = polar_integral(body, x, alpha, r_lo, r_hi, grid.resolution // 2, want_inside, grid.supersample)
    return fine, abs(fine - coarse)


def eval_bruteforce(
    body: Body, x: Sequence[float], alpha: float, grid: Optional[GridSpec] = None
) -> BruteForceValue:
    """
    V^(alpha) at x from the defining integral.

    For alpha <= 0 at an interior point the ball B_eps(x), eps = eps_fraction * dist(x, boundary),
    is cut out and the divergent term 2 pi eps^alpha / (-alpha) (2 pi log(1/eps) at 0) is
    removed; for alpha < 0 the complement route -integral over B_R \\ body minus the analytic tail
    2 pi R^alpha / (-alpha), R = 2 * diameter, is reported next to it.

    Raises:
        DomainError: If alpha <= 0 and x is on the boundary.
        OracleResolutionError: If grid.tolerance is set and the error estimate exceeds it.
    """
    grid = grid or GridSpec.from_settings()
    alpha = normalize_alpha(alpha)
    p = np.asarray(x, dtype=float)
    label = int(classify_points(body, p[None])[0])
    if alpha <= 0 and label == 0:
        raise DomainError("potential undefined on boundary")
    dist = boundary_distance(body, p)
    r_hi = _reach(body, p)
    epsilon = None
    correction = 0.0

    with track_solve("eval_bruteforce", alpha=alpha, rule=grid.rule.value):
        if alpha > 0:
            r_lo = 0.0
        elif label == 1:
            epsilon = grid.eps_fraction * dist
            r_lo = epsilon
            correction = sphere_area(PLANE) * (math.log(epsilon) if alpha == 0 else epsilon**alpha / alpha)
        else:
            # The excluded ball lies outside the body, so nothing needs renormalizing.
            r_lo = 0.25 * dist
        integral, error = _integrate(body, p, alpha, r_lo, r_hi, grid, want_inside=True)
        value = integral + correction

        complement = complement_error = None
        if alpha < 0 and label == 1:
            big = COMPLEMENT_RADIUS * body.diameter
            outside, complement_error = _integrate(body, p, alpha, 0.5 * dist, big, grid, want_inside=False)
            complement = -outside + sphere_area(PLANE) * big**alpha / alpha

    if grid.tolerance is not None:
        worst = max(error, complement_error or 0.0)
        if worst > grid.tolerance:
            raise OracleResolutionError(
                f"brute-force estimate at resolution {grid.resolution} misses tolerance {grid.tolerance:g}",
                achieved_error=worst,
            )
    return BruteForceValue(value, error, complement, complement_error, epsilon)


# --- energy ------------------------------------------------------------------------------------


def _uniform_points(body: Body, rng: np.random.Generator, n: int) -> np.ndarray:
    xmin, ymin, xmax, ymax = bounding_box(body)
    lo, span = np.array([xmin, ymin]), np.array([xmax - xmin, ymax - ymin])
    chunks, count = [], 0
    while count < n:
        trial = lo + span * rng.random((2 * (n - count) + 16, 2))
        trial = trial[classify_points(body, trial) == 1]
        chunks.append(trial)
        count += len(trial)
    return np.vstack(chunks)[:n]


def energy(body: Body, alpha: float, grid: Optional[GridSpec] = None) -> EnergyValue:
    """
    Monte Carlo estimate of the double integral of |x - y|^(alpha-2) over body x body.

    Raises:
        UnsupportedAlphaError: If alpha <= 0.
    """
    grid = grid or GridSpec.from_settings()
    alpha = normalize_alpha(alpha)
    if alpha <= 0:
        raise UnsupportedAlphaError(f"energy is only defined for alpha > 0 (got {alpha})")
    n_batches = max(2, math.ceil(grid.samples / grid.batch))
    seeds = np.random.SeedSequence(grid.seed).spawn(n_batches)

    def batch(seed: np.random.SeedSequence) -> float:
        rng = np.random.default_rng(seed)
        xs = _uniform_points(body, rng, grid.batch)
        ys = _uniform_points(body, rng, grid.batch)
        r = np.hypot(*(xs - ys).T)
        return float(np.mean(r ** (alpha - 2)))

    with track_solve("energy", alpha=alpha):
        means = np.array(map_ordered(batch, seeds))
    scale = body.area**2
    return EnergyValue(
        value=scale * float(means.mean()),
        alpha=alpha,
        stderr=scale * float(means.std(ddof=1)) / math.sqrt(n_batches),
    )


# --- extremality experiments -----------------------------------------------------------------------


def disk_extremal_value(area: float, alpha: float) -> float:
    """Mm^(alpha) of the disk with the given area (value at its center)."""
    r = math.sqrt(area / math.pi)
    alpha = normalize_alpha(alpha)
    if alpha == PLANE:
        return math.pi * r**2 * (0.5 - math.log(r))
    return eval_ball(r, alpha, PLANE)


def _names(shapes: Sequence[Body], names: Optional[Sequence[str]]) -> List[str]:
    if names is not None:
        if len(names) != len(shapes):
            raise ValueError("one name per shape is required")
        return list(names)
    return [f"shape{i}" for i in range(len(shapes))]


def _common_area(shapes: Sequence[Body]) -> float:
    area = shapes[0].area
    for shape in shapes[1:]:
        if abs(shape.area - area) > 1e-9 * area:
            raise ValueError(f"shapes must share their area: {shape.area} != {area}")
    return area


def ball_extremality_report(
    shapes: Sequence[Body],
    alpha: float,
    names: Optional[Sequence[str]] = None,
    opts: Optional[CenterOptions] = None,
) -> List[ExtremalityRow]:
    """
    Compare Mm^(alpha) of equal-area shapes with the disk: it is at least the
    disk's value for alpha > 2 and at most for alpha <= 2, with equality only for disks.
    """
    if not shapes:
        raise ValueError("ball_extremality_report needs at least one shape")
    alpha = normalize_alpha(alpha)
    area = _common_area(shapes)
    reference = disk_extremal_value(area, alpha)
    tol = 1e-8 * max(abs(reference), 1e-300)
    rows = []
    for name, shape in zip(_names(shapes, names), shapes):
        result = find_centers(shape, alpha, opts)
        gap = result.extremal_value - reference
        holds = gap >= -tol if alpha > PLANE else gap <= tol
        rows.append(ExtremalityRow(name, result.extremal_value, reference, gap, 0.0, holds, abs(gap) > tol))
        logger.info(f"{name}: Mm={result.extremal_value:.12g} disk={reference:.12g} gap={gap:.3e}")
    return rows


def energy_extremality_report(
    shapes: Sequence[Body],
    alpha: float,
    grid: Optional[GridSpec] = None,
    names: Optional[Sequence[str]] = None,
) -> List[ExtremalityRow]:
    """
    Energies of equal-area shapes against the equal-area disk. The disk must
    be the maximum for 0 < alpha < 2 and the minimum for alpha > 2, within 3 stderr.
    """
    if not shapes:
        raise ValueError("energy_extremality_report needs at least one shape")
    alpha = normalize_alpha(alpha)
    if alpha <= 0:
        raise UnsupportedAlphaError(f"energy is only defined for alpha > 0 (got {alpha})")
    area = _common_area(shapes)
    labels = _names(shapes, names)
    disk = next((s for s in shapes if is_disk(s)), None) or disk_body((0.0, 0.0), math.sqrt(area / math.pi))
    reference = energy(disk, alpha, grid)
    rows = []
    for name, shape in zip(labels, shapes):
        value = reference if shape is disk else energy(shape, alpha, grid)
        gap = value.value - reference.value
        sigma = math.hypot(value.stderr, reference.stderr)
        if alpha == PLANE:
            holds = abs(value.value - area**2) <= 3 * value.stderr + 1e-9 * area**2
        elif alpha < PLANE:
            holds = gap <= 3 * sigma
        else:
            holds = gap >= -3 * sigma
        rows.append(ExtremalityRow(name, value.value, reference.value, gap, sigma, holds, abs(gap) > 3 * sigma))
    return rows


# --- validation suite ------------------------------------------------------------------------------


def validation_points(body: Body, per_axis: int = 5) -> List[Tuple[float, float]]:
    """Interior points of a per_axis x per_axis grid over the shrunken bounding box."""
    xmin, ymin, xmax, ymax = bounding_box(body)
    ticks = (np.arange(per_axis) + 0.5) / per_axis
    points = np.array([(xmin + u * (xmax - xmin), ymin + w * (ymax - ymin)) for w in ticks for u in ticks])
    keep = classify_points(body, points) == 1
    return [tuple(map(float, p)) for p in points[keep]]


def validation_suite(
    body: Body,
    alphas: Sequence[float],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    per_axis: int = 5,
) -> List[ValidationCheck]:
    """
    Fast contour values against the brute-force oracle at interior grid points:
    |fast - oracle| <= max(1e-3 |fast|, oracle error), and for alpha < 0 the
    complement route against the eps route within 1e-4 relative (or their errors).
    """
    grid = grid or GridSpec.from_settings()
    points = validation_points(body, per_axis)
    jobs = [(normalize_alpha(a), p) for a in alphas for p in points]

    def run(job: Tuple[float, Tuple[float, float]]) -> List[ValidationCheck]:
        alpha, point = job
        try:
            fast = eval(body, point, alpha, quad).value
            oracle = eval_bruteforce(body, point, alpha, grid)
        except RieszError as e:
            logger.error(f"Validation at alpha={alpha}, x={point} failed: {e.message}")
            return [ValidationCheck("oracle", alpha, point, math.nan, math.nan, math.nan, False)]
        tolerance = max(1e-3 * abs(fast), oracle.error)
        checks = [
            ValidationCheck(
                "oracle", alpha, point, fast, oracle.value, tolerance, abs(fast - oracle.value) <= tolerance
            )
        ]
        if oracle.complement is not None:
            tol_c = max(1e-4 * abs(oracle.value), oracle.error + (oracle.complement_error or 0.0))
            checks.append(
                ValidationCheck(
                    "complement",
                    alpha,
                    point,
                    oracle.value,
                    oracle.complement,
                    tol_c,
                    abs(oracle.value - oracle.complement) <= tol_c,
                )
            )
        return checks

    with track_solve("validation_suite", checks=len(jobs)):
        logger.info(f"Running {len(jobs)} oracle comparisons")
        results = map_ordered(run, jobs)
    return [check for group in results for check in group]
