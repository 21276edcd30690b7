"""Counter-based random streams keyed by (seed, stream id).

Every Monte-Carlo quantity is drawn in fixed-size chunks, chunk ``i`` from
stream ``i``.  Results therefore do not depend on how chunks are scheduled
across workers, as long as per-chunk results are merged in chunk order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

CHUNK = 1 << 16
WORKERS_ENV = "PATHMEASURE_WORKERS"

T = TypeVar("T")


def stream(seed: int, stream_id: int) -> np.random.Generator:
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream id must be non-negative")
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), stream_id]))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    workers = int(raw)
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {raw!r}")
    return workers


def chunk_sizes(total: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[np.random.Generator, int], T],
    total: int,
    seed: int,
    workers: int | None = None,
    chunk: int = CHUNK,
) -> list[T]:
    """Evaluate ``fn(generator, size)`` per chunk; results come back in chunk order."""
    sizes = chunk_sizes(total, chunk)
    workers = default_workers() if workers is None else workers
    jobs = [(i, size) for i, size in enumerate(sizes)]

    def run(job):
        i, size = job
        return fn(stream(seed, i), size)

    if workers <= 1 or len(jobs) <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))
