"""Kernel backend selection: numba JIT or plain Python.

The hot kernels in kernels.py are written once, in scalar numpy style.
They are compiled with numba unless ROUGHSCATTER_DISABLE_JIT is set to a
truthy value (or numba is not importable), in which case the identical
source runs as ordinary Python -- much slower, but with the same
arithmetic.  benchmarks/compare_backends.py times the two paths.
"""

import os
import warnings

DISABLE_JIT = os.environ.get("ROUGHSCATTER_DISABLE_JIT", "").lower() in (
    "1",
    "true",
    "yes",
)

USING_NUMBA = False
if not DISABLE_JIT:
    try:
        import numba

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        warnings.warn(
            "numba not importable; kernels will run un-jitted", RuntimeWarning
        )

if USING_NUMBA:

    def jit(func):
        return numba.njit(cache=True, nogil=True)(func)

else:

    def jit(func):
        return func
