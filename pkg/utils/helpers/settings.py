import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, TypeVar

from dotenv import load_dotenv

from utils.helpers.errors import ConfigurationError

load_dotenv()

T = TypeVar("T")


@dataclass(frozen=True)
class Settings:
    threads: int
    seed: int
    quad_nodes: int
    quad_depth: int
    quad_rtol: float
    uf_dirs: int
    mc_samples: int
    mc_batch: int
    grid_resolution: int
    log_level: str
    log_file: Optional[str]


def _read(name: str, default: T, cast: Callable[[str], T], check: Callable[[T], bool]) -> T:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw.strip())
    except ValueError as e:
        raise ConfigurationError(f"{name}={raw!r} is not a valid value: {e}") from e
    if not check(value):
        raise ConfigurationError(f"{name}={raw!r} is out of range")
    return value


@lru_cache(maxsize=1)
def load_settings() -> Settings:
    """
    Read numeric defaults from the environment (and a `.env` file, if present).

    Returns:
        Settings: The validated configuration.

    Raises:
        ConfigurationError: If a variable cannot be parsed or is out of range.
    """
    default_threads = min(8, os.cpu_count() or 1)
    return Settings(
        threads=_read("RIESZ_THREADS", default_threads, int, lambda v: v >= 1),
        seed=_read("RIESZ_SEED", 42, int, lambda v: v >= 0),
        quad_nodes=_read("RIESZ_QUAD_NODES", 16, int, lambda v: v >= 4),
        quad_depth=_read("RIESZ_QUAD_DEPTH", 12, int, lambda v: v >= 1),
        quad_rtol=_read("RIESZ_QUAD_RTOL", 1e-10, float, lambda v: v > 0),
        uf_dirs=_read("RIESZ_UF_DIRS", 360, int, lambda v: v >= 32),
        mc_samples=_read("RIESZ_MC_SAMPLES", 1_000_000, int, lambda v: v >= 1000),
        mc_batch=_read("RIESZ_MC_BATCH", 10_000, int, lambda v: v >= 100),
        grid_resolution=_read("RIESZ_GRID_RESOLUTION", 256, int, lambda v: v >= 64),
        log_level=_read(
            "RIESZ_LOG_LEVEL",
            "WARNING",
            str.upper,
            lambda v: v in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"},
        ),
        log_file=os.getenv("RIESZ_LOG_FILE") or None,
    )
