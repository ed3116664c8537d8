import sys

from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_OK
from utils.helpers.export import field_frame, field_grid, to_csv_text, write_csv
from utils.helpers.logger import logger
from utils.helpers.potential import classify_regime, normalize_alpha, potential_field
from utils.helpers.telemetry import track_solve
from utils.session import RunConfig


def field_stage(config: RunConfig) -> int:
    """Potential on a res x res grid over the bounding box padded by 20%, as CSV."""
    body = load_body(config.bodies[0])
    alpha = normalize_alpha(config.alpha)
    points = field_grid(body, config.resolution)
    logger.info(f"Evaluating field at {len(points)} points for alpha={alpha}")
    with track_solve("field", alpha=alpha, points=len(points)):
        samples = potential_field(body, points, alpha, config.quad)
    frame = field_frame(points, samples, classify_regime(alpha).value)
    if config.out:
        write_csv(frame, config.out)
    else:
        sys.stdout.write(to_csv_text(frame))
    return EXIT_OK
