"""Reference permanents and the permanent formula for single amplitudes.

These are deliberately independent of the layered engine and serve as its
oracle in the test-suite and as the baseline in ``strongsim bench``.
"""
from __future__ import annotations

from itertools import permutations
from math import factorial, prod, sqrt
from typing import Sequence

import numpy as np

from . import kernels

NAIVE_MAX_N = 10


class MultiplicationCounter:
    """Running total of complex multiplications performed by the permanents."""

    def __init__(self):
        self.count = 0

    def reset(self) -> None:
        self.count = 0

    def add(self, n: int) -> None:
        self.count += n


counter = MultiplicationCounter()


def _square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    return np.ascontiguousarray(a)


def permanent_naive(matrix) -> complex:
    """Sum over all permutations; only for n <= 10."""
    a = _square(matrix)
    n = a.shape[0]
    if n > NAIVE_MAX_N:
        raise ValueError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    if n == 0:
        return 1 + 0j
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    terms = np.prod(a[np.arange(n), perms], axis=1)
    return complex(terms.sum())


def permanent_ryser(matrix) -> complex:
    """Inclusion-exclusion over column subsets, visited in Gray-code order."""
    a = _square(matrix)
    if a.shape[0] == 0:
        return 1 + 0j
    value, mults = kernels.ryser(a)
    counter.add(int(mults))
    return complex(value)


def permanent_glynn(matrix) -> complex:
    """Glynn's formula over sign vectors with the first sign fixed, Gray-code order."""
    a = _square(matrix)
    if a.shape[0] == 0:
        return 1 + 0j
    value, mults = kernels.glynn(a)
    counter.add(int(mults))
    return complex(value)


def _check_pair(U: np.ndarray, s: Sequence[int], t: Sequence[int]) -> None:
    m = U.shape[0]
    if U.shape != (m, m):
        raise ValueError(f"unitary must be square, got {U.shape}")
    if len(s) != m or len(t) != m:
        raise ValueError(f"states must have {m} modes")
    if sum(s) != sum(t):
        raise ValueError(f"photon counts differ: {sum(s)} vs {sum(t)}")


def build_submatrix(U, s: Sequence[int], t: Sequence[int]) -> np.ndarray:
    """Column ``j`` of ``U`` repeated ``s[j]`` times, row ``i`` repeated ``t[i]`` times."""
    U = np.asarray(U, dtype=np.complex128)
    _check_pair(U, s, t)
    rows = np.repeat(np.arange(U.shape[0]), t)
    cols = np.repeat(np.arange(U.shape[0]), s)
    return U[np.ix_(rows, cols)]


def amplitude_oracle(U, s: Sequence[int], t: Sequence[int], method: str = "ryser") -> complex:
    """``<t|U|s>`` as a normalized permanent."""
    sub = build_submatrix(U, s, t)
    perm = {
        "ryser": permanent_ryser,
        "glynn": permanent_glynn,
        "naive": permanent_naive,
    }[method](sub)
    norm = sqrt(prod(factorial(x) for x in s) * prod(factorial(x) for x in t))
    return perm / norm
