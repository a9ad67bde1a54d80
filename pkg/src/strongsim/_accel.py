"""Backend selection for the hot loops.

Set ``STRONGSIM_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba
is not importable the numpy kernels are used regardless.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested() -> bool:
    return os.environ.get("STRONGSIM_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"
