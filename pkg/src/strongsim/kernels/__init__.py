"""Hot kernels, dispatched to numba or numpy according to ``strongsim._accel``.

Both backends stay importable (``numpy_backend`` always, ``numba_backend`` when
numba is installed) so they can be benchmarked against each other.
"""
from .._accel import BACKEND, HAVE_NUMBA, USE_NUMBA
from . import _numpy as numpy_backend

if HAVE_NUMBA:
    from . import _numba as numba_backend
else:  # pragma: no cover
    numba_backend = None

_active = numba_backend if USE_NUMBA else numpy_backend

enumerate_sequences = _active.enumerate_sequences
search_sequences = _active.search_sequences
slot_layout = _active.slot_layout
parent_ranks = _active.parent_ranks
gather_rows = _active.gather_rows
ryser = _active.ryser
glynn = _active.glynn

__all__ = [
    "BACKEND",
    "enumerate_sequences",
    "search_sequences",
    "slot_layout",
    "parent_ranks",
    "gather_rows",
    "ryser",
    "glynn",
    "numpy_backend",
    "numba_backend",
]
