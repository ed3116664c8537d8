import math

import numpy as np
import pytest

from utils.helpers.errors import DomainError, NotStarShapedError
from utils.helpers.geometry import boundary_distance, disk_body, radial_profile, regular_polygon_body, transformed
from utils.helpers.potential import (
    Regime,
    axis_curvature_profile,
    classify_regime,
    dual_mixed_volume,
    eval,
    eval_ball,
    eval_log,
    eval_radial,
    gradient,
    hessian,
    laplacian,
    log_gradient,
    normalize_alpha,
    potential_field,
    second_partial,
    sphere_area,
    star_dual_check,
)


def test_sphere_areas():
    assert sphere_area(1) == 2.0
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_ball_formula_in_three_dimensions():
    assert eval_ball(1.0, 3.0, m=3) == pytest.approx(4 * math.pi / 3)


def test_regimes():
    assert classify_regime(3.0) is Regime.ABOVE_M
    assert classify_regime(2.0) is Regime.AT_M
    assert classify_regime(1.0) is Regime.BETWEEN
    assert classify_regime(0.0) is Regime.ZERO
    assert classify_regime(-1.0) is Regime.NEGATIVE
    assert normalize_alpha(1e-9) == 0.0
    assert normalize_alpha(2.0 + 1e-13) == 2.0
    with pytest.raises(ValueError):
        normalize_alpha(math.nan)


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("alpha", [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0])
def test_ball_formula_at_disk_center(radius, alpha, quad):
    disk = disk_body((0.0, 0.0), radius)
    sample = eval(disk, (0.0, 0.0), alpha, quad)
    assert sample.value == pytest.approx(eval_ball(radius, alpha), rel=1e-9, abs=1e-12)
    assert sample.renormalized == (alpha <= 0)


def test_disk_of_radius_two_at_alpha_minus_two(quad):
    assert eval(disk_body((0.0, 0.0), 2.0), (0.0, 0.0), -2.0, quad).value == pytest.approx(-math.pi / 4, rel=1e-10)


def test_area_potential_is_constant(unit_square, quad):
    for x in [(0.5, 0.5), (0.1, 0.9), (3.0, -2.0)]:
        assert eval(unit_square, x, 2.0, quad).value == pytest.approx(1.0, abs=1e-8)


def test_square_at_alpha_four(unit_square, quad):
    # Integral of |x - y|^2 over the unit square centred at x: 2 * (1/12).
    assert eval(unit_square, (0.5, 0.5), 4.0, quad).value == pytest.approx(1 / 6, rel=1e-10)


def test_potential_undefined_on_boundary(unit_square, quad):
    for alpha in (0.0, -1.0):
        with pytest.raises(DomainError, match="potential undefined on boundary"):
            eval(unit_square, (1.0, 0.5), alpha, quad)
    assert eval(unit_square, (1.0, 0.5), 1.0, quad).value > 0


def test_sign_laws_for_negative_alpha(unit_square, quad):
    assert eval(unit_square, (0.5, 0.5), -1.0, quad).value < 0
    assert eval(unit_square, (0.3, 0.6), -1.0, quad).value < 0
    assert eval(unit_square, (1.5, 0.5), -1.0, quad).value > 0


def test_log_potential_of_unit_disk(unit_disk, quad):
    assert eval_log(unit_disk, (0.0, 0.0), quad).value == pytest.approx(math.pi / 2, rel=1e-10)
    assert eval_log(unit_disk, (10.0, 0.0), quad).value == pytest.approx(-math.pi * math.log(10.0), rel=1e-9)


@pytest.mark.parametrize("alpha", [-1.0, 0.5, 3.0])
def test_homothety_scaling(pentagon, alpha, quad):
    k = 2.5
    x = pentagon.centroid + np.array([0.1, 0.05])
    scaled = transformed(pentagon, scale=k)
    expected = k**alpha * eval(pentagon, x, alpha, quad).value
    assert eval(scaled, k * x, alpha, quad).value == pytest.approx(expected, rel=1e-9)


def test_homothety_shifts_log_renormalization(pentagon, quad):
    k = 3.0
    x = pentagon.centroid
    scaled = transformed(pentagon, scale=k)
    shifted = eval(pentagon, x, 0.0, quad).value + 2 * math.pi * math.log(k)
    assert eval(scaled, k * x, 0.0, quad).value == pytest.approx(shifted, rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 1.0, 3.0])
def test_isometry_invariance(pentagon, alpha, quad):
    angle, shift = 1.1, np.array([-4.0, 7.0])
    moved = transformed(pentagon, angle=angle, translation=shift)
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    x = pentagon.centroid + np.array([-0.08, 0.12])
    expected = eval(pentagon, x, alpha, quad).value
    assert eval(moved, rot @ x + shift, alpha, quad).value == pytest.approx(expected, rel=1e-9, abs=1e-11)


@pytest.mark.parametrize("alpha", [-1.0, 0.5, 1.5, 4.0])
def test_gradient_matches_central_differences(pentagon, alpha, quad, rng, interior_sampler):
    h = 1e-5 * pentagon.diameter
    for x in interior_sampler(pentagon, rng, 20):
        x = np.asarray(x)
        g = gradient(pentagon, x, alpha, quad)
        fd = np.array(
            [
                (eval(pentagon, x + h * e, alpha, quad).value - eval(pentagon, x - h * e, alpha, quad).value) / (2 * h)
                for e in np.eye(2)
            ]
        )
        scale = max(np.linalg.norm(g), abs(eval(pentagon, x, alpha, quad).value) / pentagon.diameter)
        assert np.linalg.norm(g - fd) <= 1e-5 * scale


def test_gradient_vanishes_at_disk_center(unit_disk, quad):
    assert np.linalg.norm(gradient(unit_disk, (0.0, 0.0), 0.5, quad)) < 1e-12


def test_log_gradient_matches_central_differences(pentagon, quad, rng, interior_sampler):
    h = 1e-5 * pentagon.diameter
    for x in interior_sampler(pentagon, rng, 3):
        x = np.asarray(x)
        g = log_gradient(pentagon, x, quad)
        fd = np.array(
            [
                (eval_log(pentagon, x + h * e, quad).value - eval_log(pentagon, x - h * e, quad).value) / (2 * h)
                for e in np.eye(2)
            ]
        )
        assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(g), 1.0)
    assert np.linalg.norm(log_gradient(disk_body(), (0.0, 0.0), quad)) <= 1e-12


def test_gradient_undefined_on_boundary_for_small_alpha(unit_square, quad):
    with pytest.raises(DomainError):
        gradient(unit_square, (0.5, 0.0), 1.0, quad)


@pytest.mark.parametrize("alpha", [3.0, 4.0, 6.0])
def test_laplacian_identity(unit_square, unit_disk, alpha, quad):
    for body, x in [(unit_square, (0.5, 0.5)), (unit_square, (0.2, 0.7)), (unit_disk, (0.3, -0.4))]:
        result = laplacian(body, x, alpha, quad)
        assert result.discrepancy <= 1e-6 * abs(result.identity)


def test_second_partial_is_zero_for_area_potential(unit_square, quad):
    assert second_partial(unit_square, (0.4, 0.4), 2.0, 0, quad) == 0.0


def test_second_partial_on_boundary(unit_square, quad):
    with pytest.raises(DomainError):
        second_partial(unit_square, (0.5, 0.0), 1.0, 0, quad)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 0.5, 1.0])
def test_concavity_for_small_alpha(pentagon, alpha, quad, rng, interior_sampler):
    for x in interior_sampler(pentagon, rng, 20):
        assert np.all(np.linalg.eigvalsh(hessian(pentagon, x, alpha, quad)) < 0)


@pytest.mark.parametrize("alpha", [3.0, 4.0])
def test_convexity_for_large_alpha(pentagon, alpha, quad, rng, interior_sampler):
    for x in interior_sampler(pentagon, rng, 20, margin=0.0):
        assert second_partial(pentagon, x, alpha, 0, quad) > 0
        assert second_partial(pentagon, x, alpha, 1, quad) > 0


def test_axis_curvature_of_disk_at_alpha_four(unit_disk, quad):
    points = [(0.0, 0.0), (0.3, -0.2), (2.0, 1.0)]
    for j in (0, 1):
        profile = axis_curvature_profile(unit_disk, 4.0, points, j, quad)
        assert profile.shape == (3,)
        assert profile.tolist() == pytest.approx([2 * math.pi] * 3, rel=1e-8)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_star_duality(convex_polygon, alpha, rng, interior_sampler):
    for x in [convex_polygon.centroid, *interior_sampler(convex_polygon, rng, 2)]:
        lhs, rhs = star_dual_check(convex_polygon, x, alpha)
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_radial_formula_agrees_with_contour(unit_square, quad):
    for alpha in (1.0, 3.0, -1.0):
        radial = eval_radial(unit_square, (0.5, 0.5), alpha, n_dirs=512).value
        assert radial == pytest.approx(eval(unit_square, (0.5, 0.5), alpha, quad).value, rel=1e-3)


def test_dual_mixed_volume_is_alpha_times_potential(unit_square):
    assert dual_mixed_volume(unit_square, (0.5, 0.5), 2.0) == pytest.approx(2.0, rel=1e-3)


def test_star_duality_requires_star_shape(annulus):
    with pytest.raises(NotStarShapedError):
        star_dual_check(annulus, (1.5, 0.0), 1.0)


def ray_cast_extent(body, x, n_dirs=719):
    rays = radial_profile(body, x, n_dirs)
    return max(ray.rho_sup for ray in rays)


@pytest.mark.parametrize(
    "body, x",
    [
        (disk_body(), (0.0, 0.0)),
        (disk_body(), (0.3, 0.2)),
        (disk_body(), (-0.5, 0.1)),
        (regular_polygon_body(6), (0.0, 0.0)),
    ],
)
def test_value_law_for_large_alpha(body, x, quad):
    alpha = 200.0
    value = eval(body, x, alpha, quad).value
    assert (alpha * value) ** (1 / alpha) == pytest.approx(ray_cast_extent(body, x), rel=0.02)


def test_value_law_for_very_negative_alpha(pentagon, quad, rng, interior_sampler):
    alpha = -200.0
    for x in interior_sampler(pentagon, rng, 4):
        value = eval(pentagon, x, alpha, quad).value
        assert value < 0
        assert (-alpha * -value) ** (-1 / alpha) == pytest.approx(1 / boundary_distance(pentagon, x), rel=0.02)


def test_field_marks_undefined_points(unit_square, quad):
    points = np.array([[0.5, 0.5], [1.0, 0.5], [2.0, 2.0]])
    samples = potential_field(unit_square, points, -1.0, quad)
    assert samples[0] is not None and samples[2] is not None
    assert samples[1] is None
