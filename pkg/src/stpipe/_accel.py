"""Optional numba acceleration.

Kernels in :mod:`stpipe.kernels` are written in the numba-compatible subset
of Python/numpy. When numba is importable and ``STPIPE_DISABLE_NUMBA`` is not
set to a truthy value they are compiled with ``@njit``; otherwise the same
functions run as plain Python over numpy arrays.
"""

import os

_FLAG = os.environ.get("STPIPE_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(func=None, **kwargs):
    """``numba.njit`` when available, identity otherwise."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if HAVE_NUMBA:
            return _njit(**kwargs)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
