"""
Regime-aware search for r^(alpha-2)-centers.

The objective is rescaled so that every regime becomes a minimisation of a
quantity in length units:

    alpha > 2 or alpha < 0   f = |V|^(1/|alpha|)
    0 < alpha < 2            f = -|V|^(1/alpha)
    alpha = 0                f = -V / (2 pi)
    alpha = 2                f = -V^log

and minimised by a projected quasi-Newton (BFGS) iteration that keeps the
iterates inside the minimal unfolded region.
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.helpers.background import map_ordered
from utils.helpers.errors import DomainError, QuadratureError, RieszError, SolverError
from utils.helpers.geometry import Body, boundary_distance, classify_points
from utils.helpers.logger import logger
from utils.helpers.potential import (
    Regime,
    classify_regime,
    eval,
    eval_log,
    gradient,
    hessian,
    log_gradient,
    normalize_alpha,
)
from utils.helpers.quadrature import QuadratureSpec
from utils.helpers.telemetry import get_telemetry, track_solve
from utils.helpers.unfolding import UnfoldedRegion, unfolded_region

Point = Tuple[float, float]

ARMIJO = 1e-4
MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class CenterOptions:
    grid_n: int = 5
    max_iter: int = 200
    xtol: float = 1e-11
    gtol: float = 1e-10
    cluster_radius: float = 1e-7
    uf_dirs: Optional[int] = None
    uf_tol: float = 1e-9
    quad: Optional[QuadratureSpec] = None
    warm_starts: Tuple[Point, ...] = ()
    value_rtol: float = 1e-9
    parallel: bool = True

    def __post_init__(self):
        if self.grid_n < 1:
            raise ValueError("grid_n must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class CenterResult:
    centers: Tuple[Point, ...]
    extremal_value: float
    regime: Regime
    alpha: float
    multistart_agreement: float
    converged: bool
    message: str = ""

    @property
    def clusters(self) -> int:
        return len(self.centers)


@dataclass
class _Run:
    start: np.ndarray
    x: np.ndarray
    f: float
    raw: float
    converged: bool
    iterations: int = 0
    message: str = ""


@dataclass
class Objective:
    """Scaled objective with its gradient; infinite outside the admissible set."""

    body: Body
    alpha: float
    quad: Optional[QuadratureSpec] = None
    evaluations: int = field(default=0, init=False)

    def __post_init__(self):
        self.alpha = normalize_alpha(self.alpha)
        self.regime = classify_regime(self.alpha)
        self.interior_only = self.alpha <= 0

    def admissible(self, x: np.ndarray) -> bool:
        if not self.interior_only:
            return True
        return int(classify_points(self.body, x[None])[0]) == 1

    def __call__(self, x: np.ndarray) -> Tuple[float, np.ndarray, float]:
        """
        Returns:
            Tuple[float, np.ndarray, float]: (f, grad f, raw potential value)
        """
        if not self.admissible(x):
            return math.inf, np.zeros(2), math.nan
        self.evaluations += 1
        a = self.alpha
        if self.regime is Regime.AT_M:
            raw = eval_log(self.body, x, self.quad).value
            return -raw, -log_gradient(self.body, x, self.quad), raw
        raw = eval(self.body, x, a, self.quad).value
        grad = gradient(self.body, x, a, self.quad)
        if self.regime is Regime.ZERO:
            return -raw / (2 * math.pi), -grad / (2 * math.pi), raw
        sigma = -1.0 if self.regime is Regime.BETWEEN else 1.0
        if raw == 0.0:
            return 0.0, np.zeros(2), raw
        power = abs(raw) ** (1.0 / abs(a))
        return sigma * power, sigma * power / (abs(a) * raw) * grad, raw


def _safe_call(objective: Objective, x: np.ndarray) -> Tuple[float, np.ndarray, float]:
    try:
        return objective(x)
    except (DomainError, QuadratureError) as e:
        logger.debug(f"Objective rejected {tuple(x)}: {e}")
        return math.inf, np.zeros(2), math.nan


def _minimize(
    objective: Objective, region: UnfoldedRegion, start: np.ndarray, opts: CenterOptions
) -> _Run:
    body = objective.body
    diam = body.diameter
    x = region.project(start)
    f, g, raw = _safe_call(objective, x)
    if not math.isfinite(f):
        return _Run(start, x, f, raw, False, 0, "start is not admissible")

    def initial_inverse(grad: np.ndarray) -> np.ndarray:
        norm = float(np.linalg.norm(grad))
        return np.eye(2) * (0.1 * diam / norm if norm > 0 else 1.0)

    h_inv = initial_inverse(g)
    g0 = max(float(np.linalg.norm(g)), 1e-300)
    for iteration in range(1, opts.max_iter + 1):
        if float(np.linalg.norm(g)) <= opts.gtol * g0:
            return _Run(start, x, f, raw, True, iteration, "gradient vanished")
        d = -h_inv @ g
        if float(np.dot(d, g)) >= 0:
            h_inv = initial_inverse(g)
            d = -h_inv @ g
        cap = 0.25 * diam
        if objective.interior_only:
            cap = min(cap, 0.5 * boundary_distance(body, x))
        norm_d = float(np.linalg.norm(d))
        if norm_d > cap:
            d *= cap / norm_d

        t = 1.0
        accepted = False
        noise = 1e-12 * max(abs(f), 1e-300)
        for _ in range(MAX_BACKTRACKS):
            x_new = region.project(x + t * d)
            f_new, g_new, raw_new = _safe_call(objective, x_new)
            if math.isfinite(f_new):
                decrease = f + ARMIJO * float(np.dot(g, x_new - x))
                if f_new <= decrease:
                    accepted = True
                    break
                # Below the noise floor of f only the gradient still tells progress.
                if abs(f_new - f) <= noise and np.linalg.norm(g_new) < np.linalg.norm(g):
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            return _Run(start, x, f, raw, True, iteration, "line search exhausted at a stationary point")

        s = x_new - x
        y = g_new - g
        x, f, g, raw = x_new, f_new, g_new, raw_new
        if float(np.linalg.norm(s)) <= opts.xtol * diam:
            return _Run(start, x, f, raw, True, iteration, "step below tolerance")
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            rho = 1.0 / sy
            eye = np.eye(2)
            h_inv = (eye - rho * np.outer(s, y)) @ h_inv @ (eye - rho * np.outer(y, s)) + rho * np.outer(s, s)
    return _Run(start, x, f, raw, False, opts.max_iter, "iteration limit reached")


def multistart_points(body: Body, region: UnfoldedRegion, opts: CenterOptions, interior_only: bool) -> List[np.ndarray]:
    """Grid over the region's bounding box, its vertices, the centroid and warm starts, all projected."""
    vertices = region.vertices
    lo, hi = vertices.min(axis=0), vertices.max(axis=0)
    if opts.grid_n == 1:
        grid = [0.5 * (lo + hi)]
    else:
        ticks = np.linspace(0.0, 1.0, opts.grid_n)
        grid = [lo + np.array([u, w]) * (hi - lo) for w in ticks for u in ticks]
    candidates = [*grid, body.centroid, *vertices, *[np.asarray(p, dtype=float) for p in opts.warm_starts]]

    radius = opts.cluster_radius * body.diameter
    starts: List[np.ndarray] = []
    for p in candidates:
        q = region.project(p)
        if interior_only and int(classify_points(body, q[None])[0]) != 1:
            continue
        if all(np.linalg.norm(q - other) > radius for other in starts):
            starts.append(q)
    return starts


def cluster_runs(runs: Sequence[_Run], radius: float) -> List[List[_Run]]:
    """Greedy clustering of converged runs, best objective first."""
    clusters: List[List[_Run]] = []
    for run in sorted(runs, key=lambda r: r.f):
        for cluster in clusters:
            if np.linalg.norm(run.x - cluster[0].x) <= radius:
                cluster.append(run)
                break
        else:
            clusters.append([run])
    return clusters


def find_centers(body: Body, alpha: float, opts: Optional[CenterOptions] = None) -> CenterResult:
    """
    Locate all r^(alpha-2)-centers of a body.

    Raises:
        SolverError: If no start converges, or every start leaves the interior (alpha <= 0).
    """
    opts = opts or CenterOptions()
    alpha = normalize_alpha(alpha)
    objective = Objective(body, alpha, opts.quad)
    region = unfolded_region(body, opts.uf_dirs, opts.uf_tol)

    with track_solve("find_centers", alpha=alpha):
        starts = multistart_points(body, region, opts, objective.interior_only)
        if not starts:
            raise SolverError(f"no admissible start point in the unfolded region for alpha={alpha}")
        logger.info(f"Searching centers for alpha={alpha} from {len(starts)} starts")

        def solve(start: np.ndarray) -> _Run:
            try:
                return _minimize(Objective(body, alpha, opts.quad), region, start, opts)
            except RieszError as e:
                return _Run(start, start, math.inf, math.nan, False, 0, str(e))

        runs = map_ordered(solve, starts, parallel=opts.parallel)

    get_telemetry().count_evaluations(sum(r.iterations for r in runs), kind="solver_iteration")
    good = [r for r in runs if r.converged and math.isfinite(r.f)]
    if not good:
        messages = "; ".join(sorted({r.message for r in runs}))
        if objective.interior_only:
            raise SolverError(f"every start left the interior for alpha={alpha}: {messages}")
        raise SolverError(f"no start converged for alpha={alpha}: {messages}")

    clusters = cluster_runs(good, opts.cluster_radius * body.diameter)
    best = clusters[0][0].f
    threshold = best + opts.value_rtol * max(abs(best), 1e-300)
    global_clusters = [c for c in clusters if c[0].f <= threshold]
    centers = tuple((float(c[0].x[0]), float(c[0].x[1])) for c in global_clusters)
    agreement = sum(len(c) for c in global_clusters) / len(runs)
    logger.info(
        f"alpha={alpha}: {len(global_clusters)} center(s), {len(clusters)} cluster(s), "
        f"agreement {agreement:.2f}"
    )
    return CenterResult(
        centers=centers,
        extremal_value=float(clusters[0][0].raw),
        regime=objective.regime,
        alpha=alpha,
        multistart_agreement=agreement,
        converged=True,
        message=f"{len(good)}/{len(runs)} starts converged",
    )


def trajectory(body: Body, alphas: Sequence[float], opts: Optional[CenterOptions] = None) -> List[CenterResult]:
    """Centers for each alpha in turn, warm-started from the previous centers; failures are recorded."""
    if list(alphas) != sorted(alphas):
        raise ValueError("alphas must be sorted")
    opts = opts or CenterOptions()
    results: List[CenterResult] = []
    warm: Tuple[Point, ...] = ()
    with track_solve("trajectory", steps=len(alphas)):
        for alpha in alphas:
            try:
                result = find_centers(body, alpha, replace(opts, warm_starts=opts.warm_starts + warm))
                warm = result.centers
            except RieszError as e:
                logger.warning(f"Center search failed at alpha={alpha}: {e.message}")
                a = normalize_alpha(alpha)
                result = CenterResult((), math.nan, classify_regime(a), a, 0.0, False, e.message)
            results.append(result)
    return results


def hessian_eigenvalues(
    body: Body, alpha: float, points: Sequence[Sequence[float]], quad: Optional[QuadratureSpec] = None
) -> List[np.ndarray]:
    """Eigenvalues (ascending) of the potential's Hessian at each point."""
    return [np.linalg.eigvalsh(hessian(body, p, alpha, quad)) for p in points]
