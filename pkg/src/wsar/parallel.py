"""Worker-count resolution and deterministic block scheduling.

Work is always cut into fixed-size blocks whose boundaries do not depend on
the worker count, so results are bit-identical for any number of threads.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor

BLOCK = 4096

_threads: int | None = None


def set_threads(n: int | None) -> None:
    global _threads
    _threads = n


def get_threads(n: int | None = None) -> int:
    if n is None:
        n = _threads
    if n is None:
        env = os.environ.get("WSAR_THREADS")
        n = int(env) if env else 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def blocks(total: int, size: int = BLOCK):
    return [slice(s, min(s + size, total)) for s in range(0, total, size)]


def run_blocks(fn, slices, threads: int | None = None):
    """Apply ``fn`` to each slice, returning results in slice order."""
    n = get_threads(threads)
    if n == 1 or len(slices) == 1:
        return [fn(s) for s in slices]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, slices))


def derive_seed(seed: int, *labels) -> int:
    """64-bit seed derived from a parent seed and a label path."""
    text = ":".join([str(int(seed))] + [str(x) for x in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")
