"""Numba switch.

Hot kernels are written once in numba-compatible Python.  ``jit`` compiles
them with :func:`numba.njit` unless ``LEGALNET_DISABLE_NUMBA`` is set to a
truthy value (or numba cannot be imported), in which case the plain Python
function is used as-is.
"""
import os

_FLAG = os.environ.get("LEGALNET_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def jit(fn):
    """Compile ``fn`` with numba when enabled; return it unchanged otherwise."""
    if not USE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "python"
