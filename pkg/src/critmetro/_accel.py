"""Numba toggle.

Set ``CRITMETRO_DISABLE_NUMBA=1`` to force the pure-numpy kernels. Numba is
also skipped silently when it cannot be imported.
"""
import logging
import os

_FLAG = os.environ.get("CRITMETRO_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
