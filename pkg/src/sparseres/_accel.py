"""Optional numba acceleration.

Hot kernels are written twice: an explicit-loop version compiled with
``numba.njit`` and a vectorized numpy version.  Setting the environment
variable ``SPARSERES_DISABLE_NUMBA=1`` (or running without numba installed)
selects the numpy versions.  The flag is read once, at import time.
"""
from __future__ import annotations

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_FLAG = os.environ.get("SPARSERES_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = _numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when acceleration is enabled."""
    if not USE_NUMBA:
        return func
    return _numba.njit(cache=True)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
