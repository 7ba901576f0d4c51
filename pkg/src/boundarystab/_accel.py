"""numba switch.

Kernels are compiled with numba when it is importable and the environment
variable ``BOUNDARYSTAB_NO_NUMBA`` is unset (or "0").  Otherwise the pure
numpy implementations are used.
"""
import os

ENV_FLAG = "BOUNDARYSTAB_NO_NUMBA"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def numba_requested() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("", "0", "false", "no")


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and numba_requested() else "numpy"


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
