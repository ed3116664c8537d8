from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_NUMERICAL, EXIT_OK
from utils.helpers.logger import logger
from utils.helpers.oracle import validation_suite
from utils.session import RunConfig
from utils.utils import format_number, format_point


def validate_stage(config: RunConfig) -> int:
    """Fast contour values against the brute-force oracle, one line per check; exit 0 iff all pass."""
    body = load_body(config.bodies[0])
    checks = validation_suite(body, list(config.alphas), config.grid, config.quad, config.per_axis)
    for check in checks:
        print(
            " ".join(
                [
                    check.name,
                    format_number(check.alpha),
                    format_point(check.point),
                    format_number(check.fast),
                    format_number(check.oracle),
                    f"{check.tolerance:.3e}",
                    "PASS" if check.passed else "FAIL",
                ]
            )
        )
    failed = sum(not check.passed for check in checks)
    if failed:
        logger.error(f"{failed} of {len(checks)} validation checks failed")
        return EXIT_NUMERICAL
    return EXIT_OK
