"""Worker pool for independent evaluations.

The compiled integrator releases the GIL, so a thread pool gives real
parallelism without pickling potentials. ``SIBUYA_WORKERS`` sets the pool
size (default 1, i.e. plain serial ``map``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

WORKERS_ENV = "SIBUYA_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(func, items, workers: int | None = None) -> list:
    """Ordered ``map`` over ``items``, threaded when more than one worker is configured."""
    items = list(items)
    n = worker_count() if workers is None else workers
    if n <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
