"""Backend selection for the compiled kernels.

``TOPOPROMPT_BACKEND=numpy`` forces the pure-numpy code paths; the default
(``numba``) uses the ``@njit`` kernels when numba is importable and silently
falls back to numpy otherwise. The flag is read once, at import time.
"""
import os

BACKEND_ENV = "TOPOPROMPT_BACKEND"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _resolve_backend(value):
    value = (value or "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {value!r}")
    if value == "numba" and not HAVE_NUMBA:
        return "numpy"
    return value


BACKEND = _resolve_backend(os.environ.get(BACKEND_ENV))


def njit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
