import concurrent.futures
import threading
from functools import lru_cache
from typing import Callable, Iterable, List, TypeVar

from utils.helpers.logger import logger
from utils.helpers.settings import load_settings

T = TypeVar("T")
R = TypeVar("R")

_worker = threading.local()


@lru_cache(maxsize=1)
def get_thread_pool() -> concurrent.futures.ThreadPoolExecutor:
    """Get or create the shared ThreadPoolExecutor."""
    workers = load_settings().threads
    logger.debug(f"Creating worker pool with {workers} threads")
    return concurrent.futures.ThreadPoolExecutor(
        max_workers=workers,
        thread_name_prefix="riesz_worker",
        initializer=_mark_worker,
    )


def _mark_worker() -> None:
    _worker.active = True


def in_worker() -> bool:
    return getattr(_worker, "active", False)


def map_ordered(fn: Callable[[T], R], items: Iterable[T], parallel: bool = True) -> List[R]:
    """
    Apply `fn` to every item and return the results in input order.

    Work is spread over the shared pool unless we already run inside one of
    its workers (nested submissions would wait on themselves) or the pool has
    a single thread. Exceptions of individual items propagate to the caller.

    Args:
        fn: The function to apply.
        items: The inputs.
        parallel: Set to False to force serial evaluation.

    Returns:
        List: One result per item, ordered like `items`.
    """
    items = list(items)
    if not parallel or len(items) < 2 or in_worker() or load_settings().threads == 1:
        return [fn(item) for item in items]

    pool = get_thread_pool()
    futures = [pool.submit(fn, item) for item in items]
    try:
        return [future.result() for future in futures]
    except Exception:
        for future in futures:
            future.cancel()
        raise
