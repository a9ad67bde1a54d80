"""Single-permanent benchmark: layered engine vs Glynn and Ryser.

The worst case for the engine is the output ``|1,...,1>``, where no row of
the submatrix repeats. Each record reports wall time (best of ``repeats``)
and the exact multiplication counts of every method.
"""
from __future__ import annotations

import time

from . import permanent
from ._accel import BACKEND
from .engine import OpCounter, slos_full, slos_gen
from .fock import FockState, count_states
from .unitary import haar_random_unitary


def _best_time(fn, repeats: int):
    best, result = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_single_output(n: int, repeats: int = 3, seed: int = 0) -> dict:
    U = haar_random_unitary(n, seed)
    ones = FockState([1] * n)

    def run_slos():
        counter = OpCounter()
        res = slos_gen([ones], [ones], U, check_unitary=False, counter=counter)
        return res[(ones, ones)], counter.count

    def run_perm(fn):
        permanent.counter.reset()
        value = fn(U)
        return value, permanent.counter.count

    slos_t, (slos_val, slos_ops) = _best_time(run_slos, repeats)
    glynn_t, (glynn_val, glynn_ops) = _best_time(lambda: run_perm(permanent.permanent_glynn), repeats)
    ryser_t, (ryser_val, ryser_ops) = _best_time(lambda: run_perm(permanent.permanent_ryser), repeats)
    return {
        "n": n,
        "backend": BACKEND,
        "formula_mults": n * 2 ** (n - 1),
        "slos_mults": slos_ops,
        "glynn_mults": glynn_ops,
        "ryser_mults": ryser_ops,
        "slos_seconds": slos_t,
        "glynn_seconds": glynn_t,
        "ryser_seconds": ryser_t,
        "max_abs_diff": max(abs(slos_val - glynn_val), abs(slos_val - ryser_val)),
    }


def bench_full(m: int, n: int, repeats: int = 1, seed: int = 0, threads: int = 1) -> dict:
    U = haar_random_unitary(m, seed)
    s = FockState([1] * n + [0] * (m - n))
    counter = OpCounter()
    slos_full(s, U, keep_layers=False, counter=OpCounter())  # builds and caches the layer structures
    seconds, _ = _best_time(
        lambda: slos_full(s, U, keep_layers=False, threads=threads, counter=counter), repeats
    )
    return {
        "m": m,
        "n": n,
        "backend": BACKEND,
        "state_count": count_states(m, n),
        "mults": counter.count // repeats,
        "formula_mults": n * count_states(m, n),
        "seconds": seconds,
    }
