from utils.helpers.errors import EXIT_OK
from utils.helpers.intervals import interval_pair_center
from utils.session import RunConfig
from utils.utils import format_number


def intervals_stage(config: RunConfig) -> int:
    """Centers of [-R, -1] U [1, R]: a mirrored pair as "±x0", the origin, or the continuum."""
    result = interval_pair_center(config.R, config.alpha)
    if result.continuum:
        lo, hi = result.points
        print(f"continuum {format_number(lo)} {format_number(hi)}")
    elif len(result.points) == 1:
        print(format_number(result.points[0]))
    else:
        print(f"±{format_number(result.points[1])}")
    return EXIT_OK
