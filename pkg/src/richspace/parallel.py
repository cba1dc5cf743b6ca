"""Thread-count policy and an order-preserving parallel map.

RICHSPACE_THREADS caps internal parallelism; 0 or unset means automatic.
Results are collected in submission order, so any reduction downstream
sees exactly the sequence a sequential run would produce.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_ENV_VAR = "RICHSPACE_THREADS"
_AUTO_CAP = 8


def worker_count() -> int:
    """Number of worker threads allowed by RICHSPACE_THREADS."""
    raw = os.environ.get(_ENV_VAR, "").strip()
    if raw in ("", "0"):
        return min(os.cpu_count() or 1, _AUTO_CAP)
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply fn to every item, in parallel when allowed, preserving order."""
    workers = worker_count()
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
