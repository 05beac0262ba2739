"""Kernel backend selection.

NAPES_BACKEND picks the compute path: "numba" (default when importable),
"numpy", or "auto".  NAPES_THREADS caps the numba thread count; values are
clamped to the range numba actually supports on the host.
"""

import os
import warnings

from . import _kernels_numpy

try:
    from . import _kernels_numba
    HAS_NUMBA = True
except ImportError:
    _kernels_numba = None
    HAS_NUMBA = False

BACKEND_ENV = "NAPES_BACKEND"
THREADS_ENV = "NAPES_THREADS"


def backend_name():
    """Resolve the active backend name from the environment."""
    requested = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
    if requested == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"{BACKEND_ENV} must be 'numba', 'numpy' or 'auto', got {requested!r}")
    if requested == "numba" and not HAS_NUMBA:
        warnings.warn("numba unavailable, falling back to numpy kernels")
        return "numpy"
    return requested


def kernels():
    """Module providing the active kernel implementations."""
    name = backend_name()
    if name == "numba":
        _apply_thread_cap()
        return _kernels_numba
    return _kernels_numpy


def _apply_thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not HAS_NUMBA:
        return
    import numba

    try:
        want = int(raw)
    except ValueError:
        warnings.warn(f"ignoring non-integer {THREADS_ENV}={raw!r}")
        return
    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(min(max(want, 1), limit))
