import math

import numpy as np
import pytest

from utils.helpers.geometry import disk_body, rectangle_body
from utils.helpers.unfolding import (
    clip_halfplane,
    critical_directions,
    diameter_ratio,
    maximal_cap_offset,
    sample_directions,
    unfolded_region,
)


def incenter(a, b, c):
    a, b, c = map(np.asarray, (a, b, c))
    la, lb, lc = np.linalg.norm(b - c), np.linalg.norm(c - a), np.linalg.norm(a - b)
    return (la * a + lb * b + lc * c) / (la + lb + lc)


def circumcenter(a, b, c):
    (ax, ay), (bx, by), (cx, cy) = a, b, c
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    return np.array([ux, uy])


def test_clip_halfplane_keeps_lower_side():
    square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    clipped = clip_halfplane(square, np.array([1.0, 0.0]), 0.25)
    assert sorted(clipped) == sorted([(0.0, 0.0), (0.25, 0.0), (0.25, 1.0), (0.0, 1.0)])
    assert clip_halfplane(square, np.array([1.0, 0.0]), -1.0) == []


def test_critical_directions_cover_edges_and_normals(unit_square):
    directions = critical_directions(unit_square)
    angles = {round(math.degrees(math.atan2(y, x)) % 360, 6) % 360 for x, y in directions}
    assert {0.0, 90.0, 180.0, 270.0, 45.0, 135.0} <= angles


def test_sample_directions_are_unit_and_unique(right_triangle):
    directions = sample_directions(right_triangle, 36)
    assert np.allclose(np.linalg.norm(directions, axis=1), 1.0)
    assert len(directions) >= 36


def test_maximal_cap_offset_of_square(unit_square):
    assert maximal_cap_offset(unit_square, np.array([1.0, 0.0])) == pytest.approx(0.5, abs=1e-8)
    assert maximal_cap_offset(unit_square, np.array([0.0, -1.0])) == pytest.approx(-0.5, abs=1e-8)


def test_disk_region_is_its_center():
    disk = disk_body((1.0, -2.0), 1.5)
    region = unfolded_region(disk, 72)
    assert diameter_ratio(region, disk) <= 1e-6
    assert region.distance((1.0, -2.0)) <= 1e-6 * disk.diameter


def test_rectangle_region_is_its_center():
    rectangle = rectangle_body(2.0, 1.0)
    region = unfolded_region(rectangle, 72)
    assert region.diameter <= 1e-6 * rectangle.diameter
    assert np.linalg.norm(region.vertices.mean(axis=0) - np.array([1.0, 0.5])) <= 1e-6


def test_acute_triangle_region_has_incenter_and_circumcenter_as_vertices(acute_triangle):
    a, b, c = acute_triangle.loops[0].vertices
    region = unfolded_region(acute_triangle, 72)
    tol = 1e-6 * acute_triangle.diameter
    for target in (incenter(a, b, c), circumcenter(a, b, c)):
        assert np.min(np.linalg.norm(region.vertices - target, axis=1)) <= tol
    assert len(region.polygon) >= 3
    assert region.contains(acute_triangle.centroid)


def test_projection_lands_in_region(right_triangle):
    region = unfolded_region(right_triangle, 72)
    projected = region.project((5.0, 5.0))
    assert region.distance(projected) <= 2 * region.slack
    inside = region.vertices.mean(axis=0)
    assert np.allclose(region.project(inside), inside)


def test_region_needs_enough_directions(unit_square):
    with pytest.raises(ValueError):
        unfolded_region(unit_square, 8)
