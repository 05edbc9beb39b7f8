"""Optional numba acceleration.

Set METAPOP_HJ_DISABLE_NUMBA=1 to force the pure-numpy code paths (the flag
is read once, at import time).
"""

from __future__ import annotations

import os

ENV_FLAG = "METAPOP_HJ_DISABLE_NUMBA"


def _disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    if _disabled():
        raise ImportError("numba disabled by environment")
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available; otherwise returns the function unchanged."""
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
