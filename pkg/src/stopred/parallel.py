"""Worker-count control for the numba kernels."""

from __future__ import annotations

import os

import numba

ENV_THREADS = "STOPRED_THREADS"


def set_threads(threads: int | None = None) -> int:
    """Set the kernel thread count; ``None`` reads ``STOPRED_THREADS``.

    Results never depend on this value, only wall time does.
    """
    if threads is None:
        env = os.environ.get(ENV_THREADS)
        if not env:
            return numba.get_num_threads()
        threads = int(env)
    threads = max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)
    return threads


def chunk_count() -> int:
    return 8 * numba.get_num_threads()
