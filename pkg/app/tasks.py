"""
Lightweight task dispatch using a thread pool.

Sweep chunks run on a plain thread pool.  Results always come back in
submission order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_in_order(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply *func* to every item, concurrently when ``workers > 1``.

    The first exception raised by a task propagates to the caller once the
    pool has shut down.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    workers = min(workers, len(items))
    logger.debug("[tasks] Dispatching %d task(s) on %d thread(s).", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="sweep") as pool:
        return list(pool.map(func, items))
