import math
from typing import List, Sequence

import numpy as np

from utils.helpers.errors import ConfigurationError


def format_number(value: float) -> str:
    """
    Fixed-point text with 12 decimals, independent of the locale.

    Args:
        value (float): The number to format.

    Returns:
        str: e.g. "-0.785398163397"; "nan" / "inf" / "-inf" for non-finite values.
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.12f}"
    return "0.000000000000" if text == "-0.000000000000" else text


def format_point(point: Sequence[float]) -> str:
    return ",".join(format_number(float(c)) for c in point)


def alpha_range(start: float, stop: float, steps: int) -> List[float]:
    """
    Evenly spaced exponents from start to stop inclusive.

    Raises:
        ConfigurationError: If steps < 2 or the range is empty.
    """
    if steps < 2:
        raise ConfigurationError(f"--steps must be at least 2 (got {steps})")
    if not start < stop:
        raise ConfigurationError(f"alpha range is empty: {start} >= {stop}")
    return [float(a) for a in np.linspace(start, stop, steps)]


def parse_alpha_list(text: str) -> List[float]:
    """Comma-separated exponents, e.g. "-2,-1,0,1"."""
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"invalid alpha list {text!r}: {e}") from e
    if not values:
        raise ConfigurationError("alpha list is empty")
    return values
