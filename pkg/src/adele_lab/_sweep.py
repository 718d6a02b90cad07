"""Deterministic parallel maps over primes.

Worker count comes from ``ADELE_LAB_THREADS`` (default: machine parallelism).
Results always come back in input order, so reductions are reproducible.
Small sweeps stay in-process; spawning workers costs more than they save.
"""

import os
from concurrent.futures import ProcessPoolExecutor

PARALLEL_THRESHOLD = 20000


def worker_count() -> int:
    raw = os.environ.get("ADELE_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items, threshold: int = PARALLEL_THRESHOLD):
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) < threshold:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
