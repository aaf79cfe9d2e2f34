"""
Numba availability switch.

Setting ``PHSOLVE_DISABLE_NUMBA=1`` (or running without numba installed)
replaces ``njit`` with a no-op so every kernel runs as plain numpy/Python.
"""
import os

_DISABLED = os.environ.get("PHSOLVE_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by PHSOLVE_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # bare @njit and @njit(cache=True) forms
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
