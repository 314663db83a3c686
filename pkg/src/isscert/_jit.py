"""Numba switch.

Hot kernels are written once as plain scalar Python over ``math`` and
compiled with ``numba.njit`` when available.  Setting ``ISSCERT_DISABLE_NUMBA=1``
(or running without numba installed) leaves them as ordinary Python functions,
which is slower but numerically identical and useful for debugging and for
benchmarking the compiled path against the interpreted one.
"""

import os

_FLAG = os.environ.get("ISSCERT_DISABLE_NUMBA", "").strip().lower()

try:
    if _FLAG in ("1", "true", "yes", "on"):
        raise ImportError("numba disabled by ISSCERT_DISABLE_NUMBA")
    import numba as _nb
    USE_NUMBA = True
except ImportError:
    _nb = None
    USE_NUMBA = False


def jit(func):
    """Compile ``func`` in nopython mode, or return it untouched in fallback mode."""
    if USE_NUMBA:
        return _nb.njit(cache=True, nogil=True)(func)
    return func


def backend():
    return "numba" if USE_NUMBA else "python"
