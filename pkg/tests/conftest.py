import os
from pathlib import Path

import numpy as np
import pytest
from scipy.spatial import ConvexHull

os.environ.setdefault("RIESZ_LOG_LEVEL", "WARNING")

from utils.helpers.centers import CenterOptions  # noqa: E402
from utils.helpers.geometry import (  # noqa: E402
    Body,
    PointClass,
    annulus_body,
    boundary_distance,
    bounding_box,
    classify_point,
    disk_body,
    polygon_body,
    rectangle_body,
)
from utils.helpers.quadrature import QuadratureSpec  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


def random_convex_polygon(rng: np.random.Generator, n: int) -> Body:
    """Hull of points on a jittered circle; always exactly n vertices."""
    angles = np.sort(rng.uniform(0, 2 * np.pi, n))
    radii = rng.uniform(0.7, 1.0, n)
    points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    hull = ConvexHull(points)
    return polygon_body(points[hull.vertices])


def random_acute_triangle(rng: np.random.Generator) -> Body:
    """Vertices on the unit circle with every arc shorter than pi (circumcenter strictly inside)."""
    while True:
        angles = np.sort(rng.uniform(0, 2 * np.pi, 3))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
        if np.all(gaps < 0.9 * np.pi) and np.all(gaps > 0.2 * np.pi):
            return polygon_body(np.column_stack([np.cos(angles), np.sin(angles)]))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def unit_square() -> Body:
    return rectangle_body(1.0, 1.0)


@pytest.fixture
def unit_disk() -> Body:
    return disk_body((0.0, 0.0), 1.0)


@pytest.fixture
def annulus() -> Body:
    return annulus_body((0.0, 0.0), 2.0, 1.0)


@pytest.fixture
def right_triangle() -> Body:
    return polygon_body([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


@pytest.fixture
def acute_triangle() -> Body:
    return polygon_body([(0.0, 0.0), (4.0, 0.0), (1.5, 3.0)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def pentagon(rng) -> Body:
    return random_convex_polygon(rng, 5)


@pytest.fixture(params=range(5), ids=lambda i: f"polygon{i}")
def convex_polygon(request) -> Body:
    return random_convex_polygon(np.random.default_rng(1000 + request.param), 4 + request.param)


@pytest.fixture(params=range(5), ids=lambda i: f"acute{i}")
def random_acute(request) -> Body:
    return random_acute_triangle(np.random.default_rng(2000 + request.param))


@pytest.fixture
def l_shape() -> Body:
    return polygon_body([(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])


@pytest.fixture
def quad() -> QuadratureSpec:
    return QuadratureSpec(nodes_per_segment=16, adaptive_depth=14, target_rel_err=1e-12)


@pytest.fixture
def fast_centers(quad) -> CenterOptions:
    return CenterOptions(grid_n=3, uf_dirs=72, quad=quad)


def sample_interior(body: Body, rng: np.random.Generator, n: int, margin: float = 0.1) -> list:
    """n points inside the body at distance > margin * diameter from its boundary."""
    xmin, ymin, xmax, ymax = bounding_box(body)
    points = []
    while len(points) < n:
        p = (float(rng.uniform(xmin, xmax)), float(rng.uniform(ymin, ymax)))
        if classify_point(body, p) is PointClass.INTERIOR and boundary_distance(body, p) > margin * body.diameter:
            points.append(p)
    return points


@pytest.fixture
def interior_sampler():
    return sample_interior
