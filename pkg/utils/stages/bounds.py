from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_OK
from utils.helpers.extremal import extreme_points, maxmin_points, minmax_point
from utils.session import RunConfig
from utils.utils import format_number, format_point


def bounds_stage(config: RunConfig) -> int:
    """Min-max point (smallest enclosing disk) and the extreme max-min points (largest inscribed disks)."""
    body = load_body(config.bodies[0])
    outer = minmax_point(body, config.seed)
    print(f"minmax {format_point(outer.center)} {format_number(outer.radius)}")
    for ball in extreme_points(maxmin_points(body)):
        print(f"maxmin {format_point(ball.center)} {format_number(ball.radius)}")
    return EXIT_OK
