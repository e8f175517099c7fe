"""Worker-count control for the few embarrassingly parallel loops in kinb.

The environment variable KINB_THREADS caps the number of worker threads.
Unset or 1 means serial execution (the numpy kernels are vectorized anyway).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

__all__ = ["worker_count", "map_chunks"]


def worker_count() -> int:
    raw = os.environ.get("KINB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"KINB_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"KINB_THREADS must be >= 1, got {n}")
    return n


def map_chunks(fn: Callable, chunks: Sequence) -> list:
    """Apply fn to each chunk, threaded when KINB_THREADS > 1."""
    workers = worker_count()
    if workers == 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as ex:
        return list(ex.map(fn, chunks))
