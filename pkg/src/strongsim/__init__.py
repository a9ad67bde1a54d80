"""Exact simulation of indistinguishable photons in linear optical interferometers."""
__version__ = "0.1.0"

from ._accel import BACKEND
from .engine import (
    AmplitudeStore,
    Distribution,
    OpCounter,
    Restricted,
    SampleChain,
    Threshold,
    op_counter,
    reset_op_counter,
    sample,
    slos_full,
    slos_gen,
    slos_hybrid,
)
from .estimate import ComplexityEstimate, estimate
from .fock import (
    FockBasis,
    FockIndexMap,
    FockState,
    MaskSet,
    build_basis,
    build_index_map,
    count_states,
    sequence_increment,
    sequence_to_state,
    state_to_sequence,
)
from .permanent import amplitude_oracle, build_submatrix, permanent_glynn, permanent_naive, permanent_ryser
from .schedule import InputSchedule, build_schedule, common_factor, path
from .unitary import haar_random_unitary

__all__ = [name for name in dir() if not name.startswith("_")]
