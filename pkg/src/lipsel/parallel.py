"""Ordered parallel map bounded by ``LIPSEL_THREADS`` (default: serial)."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List


def worker_count() -> int:
    raw = os.environ.get("LIPSEL_THREADS", "").strip()
    try:
        n = int(raw) if raw else 1
    except ValueError:
        n = 1
    return max(1, n)


def pmap(fn: Callable, items: Iterable, chunksize: int = 64) -> List:
    """``list(map(fn, items))``, fanned out over worker processes when allowed.

    Results come back in input order, so the outcome does not depend on the
    worker count.
    """
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2 * chunksize:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
