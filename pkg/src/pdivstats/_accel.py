"""Backend selection for the compiled kernels.

Numba is used when it imports cleanly and ``PDIVSTATS_DISABLE_NUMBA`` is
unset or ``0``.  Otherwise every kernel falls back to its numpy twin.
"""

import os

_flag = os.environ.get("PDIVSTATS_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba as _nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    _nb = None

HAVE_NUMBA = _nb is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` with caching on; raises if numba is unavailable."""
    if _nb is None:  # pragma: no cover
        raise RuntimeError("numba is not installed")
    kwargs.setdefault("cache", True)
    return _nb.njit(*args, **kwargs)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
