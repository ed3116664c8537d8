import argparse
import os
import sys
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv

from utils.helpers.errors import EXIT_INPUT, EXIT_NUMERICAL, RieszError
from utils.helpers.logger import logger
from utils.helpers.settings import load_settings
from utils.helpers.telemetry import get_telemetry
from utils.session import RunConfig, apply_runtime_overrides, build_run_config
from utils.stages.bounds import bounds_stage
from utils.stages.center import center_stage, trajectory_stage
from utils.stages.extremality import extremality_stage
from utils.stages.field import field_stage
from utils.stages.intervals import intervals_stage
from utils.stages.uf import uf_stage
from utils.stages.validate import validate_stage
from utils.stages.value import value_stage


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors map to exit code 1."""

    def error(self, message: str):
        raise UsageError(message)


class UsageError(Exception):
    pass


def init_app() -> None:
    """Load the .env next to this file and refresh the cached settings."""
    env_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), ".env")
    if os.path.exists(env_path):
        logger.debug(f"Loading .env file from: {env_path}")
        load_dotenv(dotenv_path=env_path)
        load_settings.cache_clear()


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="riesz", description="Renormalized Riesz potentials and their centers")
    parser.add_argument("--seed", type=int, default=None, help="root seed (default RIESZ_SEED or 42)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default RIESZ_THREADS)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--quad-nodes", type=int, default=None)
    parser.add_argument("--quad-depth", type=int, default=None)
    parser.add_argument("--quad-rtol", type=float, default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    value = commands.add_parser("value", help="potential at one point")
    value.add_argument("body")
    value.add_argument("--x", type=float, required=True)
    value.add_argument("--y", type=float, required=True)
    value.add_argument("--alpha", type=float, default=None)
    value.add_argument("--log", action="store_true", help="logarithmic potential instead of V^(alpha)")

    field = commands.add_parser("field", help="potential on a grid, as CSV")
    field.add_argument("body")
    field.add_argument("--alpha", type=float, required=True)
    field.add_argument("--res", type=int, default=32)
    field.add_argument("--out", default=None)

    center = commands.add_parser("center", help="r^(alpha-2)-centers")
    center.add_argument("body")
    center.add_argument("--alpha", type=float, required=True)
    center.add_argument("--dirs", type=int, default=None)

    sweep = commands.add_parser("trajectory", help="centers along an alpha sweep")
    sweep.add_argument("body")
    sweep.add_argument("--alpha-from", type=float, required=True)
    sweep.add_argument("--alpha-to", type=float, required=True)
    sweep.add_argument("--steps", type=int, required=True)
    sweep.add_argument("--dirs", type=int, default=None)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--svg", default=None)

    uf = commands.add_parser("uf", help="minimal unfolded region")
    uf.add_argument("body")
    uf.add_argument("--dirs", type=int, default=None)
    uf.add_argument("--out", default=None)

    bounds = commands.add_parser("bounds", help="min-max and max-min points")
    bounds.add_argument("body")

    validate = commands.add_parser("validate", help="fast formulas against the brute-force oracle")
    validate.add_argument("body")
    validate.add_argument("--alpha-list", default="-2,-1,0,1,2,3,4")
    validate.add_argument("--grid-resolution", type=int, default=None)
    validate.add_argument("--rule", choices=["midpoint", "montecarlo"], default="midpoint")
    validate.add_argument("--samples", type=int, default=None)
    validate.add_argument("--points", type=int, default=5, help="validation points per axis")

    intervals = commands.add_parser("intervals", help="centers of [-R,-1] U [1,R]")
    intervals.add_argument("--R", type=float, required=True)
    intervals.add_argument("--alpha", type=float, required=True)

    extremality = commands.add_parser("extremality", help="equal-area shapes against the disk")
    extremality.add_argument("bodies", nargs="+")
    extremality.add_argument("--alpha", type=float, required=True)
    extremality.add_argument("--kind", choices=["ball", "energy"], default="ball")
    extremality.add_argument("--samples", type=int, default=None)
    return parser


STAGES: Dict[str, Callable[[RunConfig], int]] = {
    "value": value_stage,
    "field": field_stage,
    "center": center_stage,
    "trajectory": trajectory_stage,
    "uf": uf_stage,
    "bounds": bounds_stage,
    "validate": validate_stage,
    "intervals": intervals_stage,
    "extremality": extremality_stage,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse the command line, run one stage and map failures to exit codes."""
    init_app()
    try:
        args = build_parser().parse_args(argv)
        if args.command == "value" and not args.log and args.alpha is None:
            raise UsageError("value needs --alpha or --log")
        apply_runtime_overrides(args)
        config = build_run_config(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RieszError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code

    stage_function = STAGES[config.command]
    try:
        return stage_function(config)
    except RieszError as e:
        logger.debug(f"{type(e).__name__} in {config.command}", exc_info=True)
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected failure in {config.command}: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        get_telemetry().shutdown()


if __name__ == "__main__":
    sys.exit(main())
