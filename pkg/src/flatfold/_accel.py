"""Numba toggle for the hot kernels.

Set ``FLATFOLD_DISABLE_NUMBA=1`` to force the pure-numpy code paths.  The
flag is read once at import time; :func:`numba_enabled` reports the outcome.
"""

import os

_DISABLED = os.environ.get("FLATFOLD_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:  # pragma: no cover - depends on the environment
    import numba as _nb
except ImportError:  # pragma: no cover
    _nb = None

HAVE_NUMBA = _nb is not None and not _DISABLED


def numba_enabled():
    return HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when available and enabled, identity decorator otherwise."""
    if HAVE_NUMBA:
        return _nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
