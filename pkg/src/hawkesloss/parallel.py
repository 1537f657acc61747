"""Deterministic chunked map for embarrassingly parallel path loops.

Work is split into fixed-size chunks of stream indices; each chunk is a
pure function of ``(payload, start, stop)`` and chunks are reduced strictly
in index order, so results are bit-identical whatever the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

_CHUNK = 20_000


def default_threads() -> int:
    env = os.environ.get("HAWKES_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def chunk_ranges(n_items: int, chunk: int = _CHUNK):
    return [(start, min(start + chunk, n_items))
            for start in range(0, n_items, chunk)]


def run_chunks(worker, payload, n_items: int, threads: int | None = None,
               chunk: int = _CHUNK) -> list:
    """Apply ``worker(payload, start, stop)`` per chunk, results in order.

    ``worker`` must be a module-level function and ``payload`` picklable
    when more than one worker process is requested.
    """
    if threads is None or threads < 1:
        threads = default_threads()
    ranges = chunk_ranges(n_items, chunk)
    if threads == 1 or len(ranges) <= 1:
        return [worker(payload, start, stop) for start, stop in ranges]
    with ProcessPoolExecutor(max_workers=min(threads, len(ranges))) as pool:
        futures = [pool.submit(worker, payload, start, stop)
                   for start, stop in ranges]
        return [f.result() for f in futures]
