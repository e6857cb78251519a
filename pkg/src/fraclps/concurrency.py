"""Bounded parallel mapping with deterministic result ordering."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "FRACLPS_THREADS"


def worker_count() -> int:
    """Parallelism cap: FRACLPS_THREADS when set, else the CPU count."""
    raw = os.environ.get(ENV_THREADS)
    if raw is not None:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"{ENV_THREADS} must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ValueError(f"{ENV_THREADS} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def ordered_map(fn, items):
    """Map preserving input order; parallel only when more than one worker."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
