"""Ordered parallel map over independent per-N computations.

The worker count comes from ``TOEPLITZ_CHAINS_THREADS`` (default 1, serial).
Threads suffice because the heavy work is LAPACK, which releases the GIL.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError

THREADS_ENV = "TOEPLITZ_CHAINS_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items) -> list:
    """``[fn(x) for x in items]``, possibly evaluated concurrently."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
