import argparse
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from utils.helpers.background import get_thread_pool
from utils.helpers.centers import CenterOptions
from utils.helpers.errors import ConfigurationError
from utils.helpers.logger import logger, set_level
from utils.helpers.oracle import GridSpec, Rule
from utils.helpers.quadrature import QuadratureSpec
from utils.helpers.settings import load_settings
from utils.utils import alpha_range, parse_alpha_list


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs: parsed flags merged over the environment settings."""

    command: str
    bodies: Tuple[Path, ...] = ()
    alpha: Optional[float] = None
    alphas: Tuple[float, ...] = ()
    point: Optional[Tuple[float, float]] = None
    resolution: int = 32
    dirs: Optional[int] = None
    R: Optional[float] = None
    kind: str = "ball"
    log_potential: bool = False
    out: Optional[Path] = None
    svg: Optional[Path] = None
    seed: int = 42
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    centers: CenterOptions = field(default_factory=CenterOptions)
    per_axis: int = 5


def apply_runtime_overrides(args: argparse.Namespace) -> None:
    """
    Push the process-wide flags (--threads, --log-level) into the environment
    before any worker pool exists, so every later load_settings() sees them.
    Without --log-level the logger follows Settings.log_level.
    """
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise ConfigurationError("--threads must be at least 1")
        os.environ["RIESZ_THREADS"] = str(args.threads)
        load_settings.cache_clear()
        get_thread_pool.cache_clear()
    level = getattr(args, "log_level", None) or load_settings().log_level
    try:
        set_level(level)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e


def _check_writable(path: Optional[Path]) -> Optional[Path]:
    if path is None:
        return None
    parent = path.resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigurationError(f"cannot write output to {path}")
    return path


def _alphas(args: argparse.Namespace) -> List[float]:
    if getattr(args, "alpha_list", None):
        return parse_alpha_list(args.alpha_list)
    if getattr(args, "alpha_from", None) is not None:
        return alpha_range(args.alpha_from, args.alpha_to, args.steps)
    return []


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge command-line flags with the environment settings.

    Args:
        args (argparse.Namespace): Parsed arguments of one subcommand.

    Returns:
        RunConfig: The validated configuration for the run.

    Raises:
        ConfigurationError: If a flag is out of range.
    """
    settings = load_settings()
    seed = settings.seed if args.seed is None else args.seed
    quad = QuadratureSpec(
        nodes_per_segment=args.quad_nodes or settings.quad_nodes,
        adaptive_depth=settings.quad_depth if args.quad_depth is None else args.quad_depth,
        target_rel_err=args.quad_rtol or settings.quad_rtol,
    )
    grid = GridSpec(
        resolution=getattr(args, "grid_resolution", None) or settings.grid_resolution,
        rule=Rule(getattr(args, "rule", Rule.MIDPOINT.value)),
        seed=seed,
        samples=getattr(args, "samples", None) or settings.mc_samples,
        batch=settings.mc_batch,
    )
    dirs = getattr(args, "dirs", None)
    if dirs is not None and dirs < 32:
        raise ConfigurationError(f"--dirs must be at least 32 (got {dirs})")
    R = getattr(args, "R", None)
    if R is not None and not R > 1:
        raise ConfigurationError(f"--R must be greater than 1 (got {R})")
    resolution = getattr(args, "res", None) or 32
    if resolution < 8:
        raise ConfigurationError(f"--res must be at least 8 (got {resolution})")
    centers = CenterOptions(quad=quad, uf_dirs=dirs or settings.uf_dirs)

    point = None
    if getattr(args, "x", None) is not None:
        point = (args.x, args.y)

    bodies = getattr(args, "bodies", None) or ([args.body] if getattr(args, "body", None) else [])
    config = RunConfig(
        command=args.command,
        bodies=tuple(Path(b) for b in bodies),
        alpha=getattr(args, "alpha", None),
        alphas=tuple(_alphas(args)),
        point=point,
        resolution=resolution,
        dirs=dirs,
        R=R,
        kind=getattr(args, "kind", "ball"),
        log_potential=getattr(args, "log", False),
        out=_check_writable(Path(args.out) if getattr(args, "out", None) else None),
        svg=_check_writable(Path(args.svg) if getattr(args, "svg", None) else None),
        seed=seed,
        quad=quad,
        grid=grid,
        centers=centers,
        per_axis=getattr(args, "points", None) or 5,
    )
    logger.debug(f"Run configuration: {config}")
    return config
