"""Ordered parallel map over independent work items.

Worker count comes from the PERFPIPE_THREADS environment variable (default 1,
serial). Results are always reduced in submission order, so output is
byte-for-byte identical regardless of worker count. Workers force themselves
serial to avoid nested pools.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

THREADS_ENV = "PERFPIPE_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _init_worker() -> None:
    # no nested pools inside a worker process
    os.environ[THREADS_ENV] = "1"


def map_ordered(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply ``fn`` to each item, preserving item order in the result."""
    n_workers = worker_count()
    if n_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (4 * n_workers))
    with ProcessPoolExecutor(max_workers=n_workers, initializer=_init_worker) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
