import math
from dataclasses import replace

import numpy as np
import pytest

from utils.helpers.centers import (
    CenterOptions,
    Objective,
    _Run,
    cluster_runs,
    hessian_eigenvalues,
    find_centers,
    trajectory,
)
from utils.helpers.geometry import Body, CircleLoop, PointClass, classify_point, disk_body, polygon_body
from utils.helpers.potential import Regime
from utils.helpers.unfolding import unfolded_region


def incenter(a, b, c):
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    la, lb, lc = np.linalg.norm(b - c), np.linalg.norm(a - c), np.linalg.norm(a - b)
    return (la * a + lb * b + lc * c) / (la + lb + lc)


def test_options_validation():
    with pytest.raises(ValueError):
        CenterOptions(grid_n=0)
    with pytest.raises(ValueError):
        CenterOptions(max_iter=0)


@pytest.mark.parametrize("trial", range(10))
def test_centroid_is_the_center_at_alpha_four(trial, fast_centers):
    rng = np.random.default_rng(100 + trial)
    while True:
        points = rng.uniform(-1.0, 1.0, size=(3, 2))
        d = points[1:] - points[0]
        if abs(d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0]) > 0.3:
            break
    triangle = polygon_body(points)
    result = find_centers(triangle, 4.0, fast_centers)
    assert result.clusters == 1
    assert np.linalg.norm(np.array(result.centers[0]) - triangle.centroid) <= 1e-7 * triangle.diameter


@pytest.mark.parametrize("alpha", [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0])
def test_disk_center_is_the_origin(unit_disk, alpha, fast_centers):
    result = find_centers(unit_disk, alpha, fast_centers)
    assert result.clusters == 1
    assert np.linalg.norm(result.centers[0]) <= 1e-8
    assert result.converged


@pytest.fixture
def multistart(fast_centers) -> CenterOptions:
    return replace(fast_centers, grid_n=5)


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 1.0])
def test_convex_bodies_have_one_center(convex_polygon, alpha, multistart):
    result = find_centers(convex_polygon, alpha, multistart)
    assert result.clusters == 1
    assert 0.0 < result.multistart_agreement <= 1.0


@pytest.mark.parametrize("alpha", [3.0, 4.0, 6.0])
@pytest.mark.parametrize("name", ["pentagon", "l_shape", "acute_triangle"])
def test_large_alpha_has_one_center(request, name, alpha, multistart):
    body = request.getfixturevalue(name)
    result = find_centers(body, alpha, multistart)
    assert result.clusters == 1
    assert 0.0 < result.multistart_agreement <= 1.0


def test_l_shape_center_at_alpha_four_is_its_centroid(l_shape, multistart):
    result = find_centers(l_shape, 4.0, multistart)
    assert result.centers[0] == pytest.approx((5 / 6, 5 / 6), abs=1e-7 * l_shape.diameter)


@pytest.mark.parametrize("alpha", [-3.0, -2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0])
def test_centers_lie_in_the_unfolded_region(convex_polygon, alpha, fast_centers):
    region = unfolded_region(convex_polygon, fast_centers.uf_dirs)
    for center in find_centers(convex_polygon, alpha, fast_centers).centers:
        assert region.distance(center) <= 1e-6 * convex_polygon.diameter


@pytest.mark.parametrize("alpha", [-1.0, 0.0])
def test_centers_are_interior_for_nonpositive_alpha(right_triangle, alpha, fast_centers):
    result = find_centers(right_triangle, alpha, fast_centers)
    assert result.regime in (Regime.NEGATIVE, Regime.ZERO)
    for center in result.centers:
        assert classify_point(right_triangle, center) is PointClass.INTERIOR


def test_two_disks_have_mirrored_centers(fast_centers):
    body = Body((CircleLoop((-2.0, 0.0), 1.0), CircleLoop((2.0, 0.0), 1.0)))
    result = find_centers(body, -1.0, fast_centers)
    assert result.clusters == 2
    left, right = sorted(result.centers)
    assert left[0] == pytest.approx(-right[0], abs=1e-6)
    assert abs(left[1]) <= 1e-6 and abs(right[1]) <= 1e-6
    assert 1.0 < right[0] < 3.0


@pytest.mark.parametrize("alpha, target", [(50.0, "circumcenter"), (-50.0, "incenter")])
def test_acute_triangle_limits(acute_triangle, fast_centers, alpha, target):
    a, b, c = acute_triangle.loops[0].vertices
    expected = {"circumcenter": np.array([2.0, 0.875]), "incenter": incenter(a, b, c)}[target]
    result = find_centers(acute_triangle, alpha, fast_centers)
    assert result.clusters == 1
    assert np.linalg.norm(np.array(result.centers[0]) - expected) <= 1e-2 * acute_triangle.diameter


def test_trajectory_on_acute_triangle_reaches_both_limits(acute_triangle, fast_centers):
    a, b, c = acute_triangle.loops[0].vertices
    diam = acute_triangle.diameter
    results = trajectory(acute_triangle, [-50.0, 0.0, 50.0], fast_centers)
    assert [r.converged for r in results] == [True, True, True]
    assert np.linalg.norm(np.array(results[0].centers[0]) - incenter(a, b, c)) <= 1e-2 * diam
    assert np.linalg.norm(np.array(results[-1].centers[0]) - np.array([2.0, 0.875])) <= 1e-2 * diam


def test_objective_is_infinite_outside_for_negative_alpha(unit_square, quad):
    objective = Objective(unit_square, -1.0, quad)
    f, grad, raw = objective(np.array([2.0, 2.0]))
    assert f == math.inf
    assert math.isnan(raw)
    assert objective.evaluations == 0


def test_objective_scaling_between_plane_dimension(unit_disk, quad):
    objective = Objective(unit_disk, 1.0, quad)
    f, _, raw = objective(np.zeros(2))
    assert raw == pytest.approx(2 * math.pi, rel=1e-10)
    assert f == pytest.approx(-raw, rel=1e-10)


def test_cluster_runs_groups_nearby_points():
    samples = [((0.5, 0.0), 2.0), ((0.0, 0.0), 1.0), ((1e-9, 0.0), 1.0)]
    runs = [_Run(np.zeros(2), np.array(p), f, f, True) for p, f in samples]
    clusters = cluster_runs(runs, 1e-7)
    assert [len(c) for c in clusters] == [2, 1]
    assert clusters[0][0].f == 1.0


def test_trajectory_requires_sorted_alphas(unit_disk, fast_centers):
    with pytest.raises(ValueError):
        trajectory(unit_disk, [1.0, 0.0], fast_centers)


def test_trajectory_on_disk(fast_centers):
    disk = disk_body((1.0, -1.0), 0.5)
    results = trajectory(disk, [-1.0, 1.0, 3.0], fast_centers)
    assert [r.alpha for r in results] == [-1.0, 1.0, 3.0]
    for result in results:
        assert result.converged
        assert result.centers[0] == pytest.approx((1.0, -1.0), abs=1e-7)


def test_hessian_is_negative_definite_for_small_alpha(pentagon, quad, rng, interior_sampler):
    points = interior_sampler(pentagon, rng, 3)
    for eigenvalues in hessian_eigenvalues(pentagon, 1.0, points, quad):
        assert eigenvalues[0] <= eigenvalues[1] < 0
