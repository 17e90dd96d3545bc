"""JIT toggle for the hot mod-p kernels.

Setting the environment variable ``OBSTRUCT_NO_NUMBA=1`` (or numba being
absent) replaces ``njit`` by a no-op decorator, so every kernel also runs
as plain numpy/Python.  ``benchmarks/bench_kernels.py`` times both paths.
"""

from __future__ import annotations

import os

JIT_ENABLED = os.environ.get("OBSTRUCT_NO_NUMBA", "") not in ("1", "true", "yes")

if JIT_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper
