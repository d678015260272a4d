"""Ordered parallel map used for per-state and per-schedule-point work."""

from __future__ import annotations

from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterable, Iterator, List, Optional, TypeVar

from .config import load_settings

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    pool: Optional[Executor] = None,
) -> List[R]:
    """Apply fn to every item; results come back in input order."""
    items = list(items)
    if pool is not None:
        return list(pool.map(fn, items))
    if workers is None:
        workers = load_settings().workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(fn, items))


@contextmanager
def worker_pool(workers: int, size: int) -> Iterator[Optional[Executor]]:
    """
    One executor for a loop of ordered_map calls over at most size items.
    Yields None when the work would run inline anyway.
    """
    if workers <= 1 or size <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=min(workers, size)) as executor:
        yield executor
