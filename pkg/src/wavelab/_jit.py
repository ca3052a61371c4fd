"""Switch between numba-compiled kernels and the pure numpy path.

``WAVELAB_JIT=0`` forces the numpy path even when numba is importable.
``WAVELAB_THREADS`` caps the number of numba worker threads.
"""

import os

_flag = os.environ.get("WAVELAB_JIT", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _wanted

if HAVE_NUMBA:
    # try OpenMP and the built-in work queue before TBB, which warns when too old
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    _threads = os.environ.get("WAVELAB_THREADS")
    if _threads:
        try:
            numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
        except ValueError:
            pass


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity decorator otherwise.

    Kernels are always compiled lazily, so importing wavelab with the jit
    disabled costs nothing.
    """
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


prange = numba.prange if HAVE_NUMBA else range
