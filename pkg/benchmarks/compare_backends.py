#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Three workloads: the layer gather behind slos_full (m = n = 10 by default),
the Glynn permanent, and the Ryser permanent. Each row reports the best wall
time of a few repeats and checks that both backends produce the same numbers.

    python benchmarks/compare_backends.py --m 10 --n 10 --perm-n 16
"""
from __future__ import annotations

import argparse
import time
from math import sqrt

import numpy as np

from strongsim import FockState, haar_random_unitary
from strongsim.fock import layer_structures
from strongsim.kernels import numba_backend, numpy_backend


def best_of(fn, repeats):
    best, result = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def full_run(backend, structures, s, U):
    amp = np.ones(1, dtype=np.complex128)
    occ = [0] * s.m
    photons = [i for i, x in enumerate(s) for _ in range(x)]
    for k, p in enumerate(photons, start=1):
        occ[p] += 1
        imap = structures.maps[k]
        out = np.empty(structures.bases[k].count, dtype=np.complex128)
        rows = np.arange(out.shape[0], dtype=np.int64)
        backend.gather_rows(
            imap.parent_indices, imap.modes, imap.counts, amp,
            np.ascontiguousarray(U[:, p]), 1.0 / sqrt(occ[p]), out, rows,
        )
        amp = out
    return amp


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=10)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--perm-n", type=int, default=14)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    if numba_backend is None:
        raise SystemExit("numba is not installed; nothing to compare")

    U = haar_random_unitary(args.m, 0)
    s = FockState([1] * min(args.n, args.m) + [0] * (args.m - min(args.n, args.m)))
    structures = layer_structures(args.m, s.n)
    A = haar_random_unitary(args.perm_n, 1)

    # warm-up compiles the numba kernels outside the timed region
    full_run(numba_backend, structures, s, U)
    numba_backend.glynn(A[:3, :3])
    numba_backend.ryser(A[:3, :3])

    workloads = [
        (f"gather m={args.m} n={s.n}", lambda b: full_run(b, structures, s, U)),
        (f"glynn n={args.perm_n}", lambda b: b.glynn(A)[0]),
        (f"ryser n={args.perm_n}", lambda b: b.ryser(A)[0]),
    ]
    print(f"{'workload':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, fn in workloads:
        t_nb, r_nb = best_of(lambda: fn(numba_backend), args.repeats)
        t_np, r_np = best_of(lambda: fn(numpy_backend), args.repeats)
        diff = float(np.max(np.abs(np.asarray(r_nb) - np.asarray(r_np))))
        print(f"{name:<22}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
