import math

import pytest

from utils.helpers.intervals import derivative, interval_pair_center


@pytest.mark.parametrize("R", [2.0, 4.0, 9.0])
def test_log_centers_are_plus_minus_sqrt_r(R):
    result = interval_pair_center(R, 1.0)
    assert not result.continuum
    assert result.points[1] == pytest.approx(math.sqrt(R), abs=1e-10)
    assert result.points[0] == -result.points[1]


def test_area_exponent_gives_a_continuum():
    result = interval_pair_center(4.0, 2.0)
    assert result.continuum
    assert result.points == (-1.0, 1.0)


def test_large_alpha_gives_the_origin():
    assert interval_pair_center(4.0, 3.0).points == (0.0,)


def test_very_negative_alpha_approaches_interval_midpoints():
    result = interval_pair_center(4.0, -40.0)
    assert abs(result.points[1] - 2.5) <= 0.02


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 0.5, 1.5])
def test_roots_zero_the_derivative(alpha):
    R = 3.0
    x0 = interval_pair_center(R, alpha).points[1]
    assert 1.0 < x0 < 0.5 * (R + 1)
    assert abs(derivative(R, alpha)(x0)) <= 1e-8


def test_interval_pair_needs_r_above_one():
    with pytest.raises(ValueError):
        interval_pair_center(1.0, 0.0)
    with pytest.raises(ValueError):
        interval_pair_center(4.0, math.nan)
