"""Kernel backend selection.

Hot numeric kernels ship in two flavors: numba ``@njit`` and pure numpy.
Set ``TWINEDIT_DISABLE_NUMBA=1`` to force the numpy fallback (also used
automatically when numba is not installed).
"""

import os


def _numba_wanted() -> bool:
    return os.environ.get("TWINEDIT_DISABLE_NUMBA", "").lower() not in ("1", "true", "yes")


if _numba_wanted():
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
