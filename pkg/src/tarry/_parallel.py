"""Counter-seeded batches and an order-preserving thread map.

Results depend only on (seed, total, batch_size).  The thread count read
from TARRY_THREADS only changes how batches are scheduled.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BATCH_SIZE = 4096


def thread_count() -> int:
    try:
        n = int(os.environ.get("TARRY_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def batches(total: int, batch_size: int = BATCH_SIZE):
    """Yield (batch_index, start, count) covering range(total)."""
    b = 0
    for start in range(0, total, batch_size):
        yield b, start, min(batch_size, total - start)
        b += 1


def batch_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for one batch; ``key`` is a counter path such as (shell, batch)."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def ordered_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def pairwise_sum(values) -> float:
    """Fixed-shape pairwise summation tree over an ordered list."""
    vals = [float(v) for v in values]
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
