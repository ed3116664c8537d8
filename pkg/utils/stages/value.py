from utils.helpers.body_file import load_body
from utils.helpers.errors import EXIT_OK
from utils.helpers.logger import logger
from utils.helpers.potential import eval, eval_log
from utils.session import RunConfig
from utils.utils import format_number


def value_stage(config: RunConfig) -> int:
    """Print V^(alpha)(x) (or V^log with --log) and its quadrature error estimate."""
    body = load_body(config.bodies[0])
    if config.log_potential:
        sample = eval_log(body, config.point, config.quad)
    else:
        sample = eval(body, config.point, config.alpha, config.quad)
    logger.info(f"regime={sample.regime.value} renormalized={sample.renormalized}")
    print(format_number(sample.value))
    print(f"quad_error {sample.quad_error:.3e}")
    return EXIT_OK
