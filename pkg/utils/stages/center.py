import sys

from utils.helpers.body_file import load_body
from utils.helpers.centers import find_centers, trajectory
from utils.helpers.errors import EXIT_OK
from utils.helpers.export import render_trajectory_svg, to_csv_text, trajectory_frame, write_csv, write_svg
from utils.helpers.extremal import maxmin_points, minmax_point
from utils.helpers.unfolding import unfolded_region
from utils.session import RunConfig
from utils.utils import format_number, format_point


def center_stage(config: RunConfig) -> int:
    """Print every r^(alpha-2)-center and the extremal value Mm^(alpha)."""
    body = load_body(config.bodies[0])
    result = find_centers(body, config.alpha, config.centers)
    for center in result.centers:
        print(f"center {format_point(center)}")
    print(f"extremal_value {format_number(result.extremal_value)}")
    print(f"regime {result.regime.value} clusters {result.clusters} agreement {result.multistart_agreement:.2f}")
    return EXIT_OK


def trajectory_stage(config: RunConfig) -> int:
    """Centers along an alpha sweep as CSV, optionally drawn over the body as SVG."""
    body = load_body(config.bodies[0])
    results = trajectory(body, list(config.alphas), config.centers)
    frame = trajectory_frame(results)
    if config.out:
        write_csv(frame, config.out)
    else:
        sys.stdout.write(to_csv_text(frame))
    if config.svg:
        region = unfolded_region(body, config.centers.uf_dirs, config.centers.uf_tol)
        svg = render_trajectory_svg(
            body, region, results, minmax=minmax_point(body, config.seed), maxmin=maxmin_points(body)
        )
        write_svg(svg, config.svg)
    return EXIT_OK
