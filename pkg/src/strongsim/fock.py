"""Fock states, photon-to-mode sequences and the per-layer index structures.

A layer holds every Fock state of ``k`` photons over ``m`` modes. States are
ordered by the lexicographic order of their photon-to-mode sequence (the sorted
list of the modes each photon occupies), so ``|2,0>`` < ``|1,1>`` < ``|0,2>``.
Mode indices are 0-based everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import kernels


class StateNotFoundError(KeyError):
    """Raised when a state is absent from a basis (wrong layer or masked out)."""


class StructureError(ValueError):
    """Raised when layer structures are mutually inconsistent."""


class FockState(tuple):
    """Occupation numbers of a Fock state, one entry per mode.

    Behaves like a tuple of ints (and compares equal to one), so it can be
    used directly as a dictionary key.
    """

    def __new__(cls, occupations: Iterable[int]):
        occ = tuple(int(x) for x in occupations)
        if not occ:
            raise ValueError("a Fock state needs at least one mode")
        if any(x < 0 for x in occ):
            raise ValueError(f"negative occupation in {occ}")
        return super().__new__(cls, occ)

    @classmethod
    def vacuum(cls, m: int) -> "FockState":
        return cls((0,) * m)

    @classmethod
    def parse(cls, text: str) -> "FockState":
        """Parse ``"1,0,2"`` or ``"|1,0,2>"``."""
        body = text.strip().lstrip("|").rstrip(">⟩").strip()
        return cls(int(x) for x in body.split(","))

    @property
    def m(self) -> int:
        return len(self)

    @property
    def n(self) -> int:
        return sum(self)

    def add(self, mode: int, count: int = 1) -> "FockState":
        occ = list(self)
        occ[mode] += count
        return FockState(occ)

    def __repr__(self) -> str:
        return "|" + ",".join(str(x) for x in self) + "⟩"

    __str__ = __repr__


def count_states(m: int, k: int) -> int:
    """Number of ``k``-photon states over ``m`` modes, exact."""
    if m < 1 or k < 0:
        raise ValueError(f"need m >= 1 and k >= 0, got m={m}, k={k}")
    return comb(k + m - 1, m - 1)


def state_to_sequence(state: Sequence[int]) -> tuple[int, ...]:
    return tuple(j for j, s in enumerate(state) for _ in range(s))


def sequence_to_state(positions: Sequence[int], m: int) -> FockState:
    occ = [0] * m
    prev = 0
    for p in positions:
        if not 0 <= p < m:
            raise ValueError(f"position {p} outside [0, {m})")
        if p < prev:
            raise ValueError(f"positions must be nondecreasing: {tuple(positions)}")
        occ[p] += 1
        prev = p
    return FockState(occ)


def sequence_increment(positions: Sequence[int], m: int) -> tuple[int, ...] | None:
    """Lexicographic successor among nondecreasing sequences; ``None`` at the end."""
    seq = list(positions)
    i = len(seq) - 1
    while i >= 0 and seq[i] == m - 1:
        i -= 1
    if i < 0:
        return None
    v = seq[i] + 1
    seq[i:] = [v] * (len(seq) - i)
    return tuple(seq)


def occupations_from_sequences(seqs: np.ndarray, m: int) -> np.ndarray:
    count = seqs.shape[0]
    occ = np.zeros((count, m), dtype=np.int64)
    if seqs.shape[1]:
        rows = np.repeat(np.arange(count), seqs.shape[1])
        np.add.at(occ, (rows, seqs.ravel()), 1)
    return occ


def sequences_from_occupations(occ: np.ndarray) -> np.ndarray:
    occ = np.asarray(occ, dtype=np.int64)
    k = int(occ[0].sum()) if occ.shape[0] else 0
    if occ.shape[0] and np.any(occ.sum(axis=1) != k):
        raise ValueError("all states must share the same photon count")
    modes = np.arange(occ.shape[1])
    out = np.empty((occ.shape[0], k), dtype=np.int64)
    for r in range(occ.shape[0]):
        out[r] = np.repeat(modes, occ[r])
    return out


@lru_cache(maxsize=None)
def _rank_table(m: int, k: int) -> np.ndarray:
    # table[r, v]: number of nondecreasing length-r tails whose first value is < v
    table = np.zeros((k + 1, m + 1), dtype=object)
    for r in range(k + 1):
        acc = 0
        for v in range(m + 1):
            table[r, v] = acc
            if v < m and r > 0:
                acc += count_states(m - v, r - 1)
    return table


def lex_ranks(seqs: np.ndarray, m: int) -> np.ndarray:
    """Rank of each sequence within the full unmasked layer, without a basis.

    Agrees with ``build_basis(m, k).rank`` and is used as the storage key of
    sparse amplitude stores.
    """
    seqs = np.asarray(seqs, dtype=np.int64)
    count, k = seqs.shape
    if count_states(m, k) >= 2**63:
        raise OverflowError(f"layer m={m}, k={k} does not fit 64-bit ranks")
    table = _rank_table(m, k).astype(np.int64)
    ranks = np.zeros(count, dtype=np.int64)
    prev = np.zeros(count, dtype=np.int64)
    for i in range(k):
        tail = k - i
        ranks += table[tail, seqs[:, i]] - table[tail, prev]
        prev = seqs[:, i]
    return ranks


def lex_rank(state: Sequence[int]) -> int:
    seq = np.array([state_to_sequence(state)], dtype=np.int64).reshape(1, -1)
    return int(lex_ranks(seq, len(state))[0])


@dataclass(frozen=True)
class MaskSet:
    """Union of per-mode occupancy upper bounds.

    A state passes when it fits under at least one mask.
    """

    masks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        masks = tuple(tuple(int(x) for x in mk) for mk in self.masks)
        if not masks:
            raise ValueError("a MaskSet needs at least one mask")
        if len({len(mk) for mk in masks}) != 1:
            raise ValueError("all masks must have the same number of modes")
        if any(x < 0 for mk in masks for x in mk):
            raise ValueError("mask bounds must be non-negative")
        object.__setattr__(self, "masks", masks)

    @classmethod
    def of(cls, *masks: Sequence[int]) -> "MaskSet":
        return cls(tuple(tuple(mk) for mk in masks))

    @classmethod
    def parse(cls, pattern: str, n: int) -> "MaskSet":
        """Parse ``"1,1,*,*"``; ``*`` becomes the photon count ``n``."""
        bounds = [n if tok.strip() == "*" else int(tok) for tok in pattern.split(",")]
        return cls((tuple(bounds),))

    @property
    def m(self) -> int:
        return len(self.masks[0])

    def passes(self, state: Sequence[int]) -> bool:
        return any(all(t <= b for t, b in zip(state, mk)) for mk in self.masks)

    def filter(self, occ: np.ndarray) -> np.ndarray:
        bounds = np.array(self.masks, dtype=np.int64)
        return np.any(np.all(occ[:, None, :] <= bounds[None, :, :], axis=2), axis=1)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Ordered list of the states of one photon layer (optionally masked)."""

    m: int
    k: int
    sequences: np.ndarray
    mask: MaskSet | None = None
    _occupations: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.sequences.setflags(write=False)

    @property
    def count(self) -> int:
        return self.sequences.shape[0]

    def __len__(self) -> int:
        return self.count

    @property
    def occupations(self) -> np.ndarray:
        if not self._occupations:
            occ = occupations_from_sequences(self.sequences, self.m)
            occ.setflags(write=False)
            self._occupations.append(occ)
        return self._occupations[0]

    def state_at(self, index: int) -> FockState:
        return sequence_to_state(self.sequences[index].tolist(), self.m)

    def states(self) -> list[FockState]:
        return [FockState(row) for row in self.occupations.tolist()]

    def rank(self, state: Sequence[int]) -> int:
        if len(state) != self.m or sum(state) != self.k:
            raise StateNotFoundError(f"{tuple(state)} is not in layer m={self.m}, k={self.k}")
        query = np.array(state_to_sequence(state), dtype=np.int64).reshape(1, self.k)
        idx = int(self.rank_sequences(query)[0])
        if idx < 0:
            raise StateNotFoundError(f"{tuple(state)} is masked out of this basis")
        return idx

    def rank_sequences(self, seqs: np.ndarray) -> np.ndarray:
        """Vectorized ranks; ``-1`` where a sequence is absent."""
        return kernels.search_sequences(self.sequences, np.asarray(seqs, dtype=np.int64))

    def global_ranks(self) -> np.ndarray:
        return lex_ranks(self.sequences, self.m)

    def same_structure(self, other: "FockBasis") -> bool:
        return (
            self.m == other.m
            and self.k == other.k
            and np.array_equal(self.sequences, other.sequences)
        )


def build_basis(m: int, k: int, mask: MaskSet | None = None) -> FockBasis:
    total = count_states(m, k)
    seqs = kernels.enumerate_sequences(m, k, total)
    if mask is not None:
        if mask.m != m:
            raise ValueError(f"mask has {mask.m} modes, basis has {m}")
        seqs = seqs[mask.filter(occupations_from_sequences(seqs, m))]
    return FockBasis(m, k, np.ascontiguousarray(seqs, dtype=np.int64), mask)


def basis_from_states(states: Iterable[Sequence[int]], m: int, k: int) -> FockBasis:
    """Basis over an explicit set of states (deduplicated, canonically ordered)."""
    rows = sorted({state_to_sequence(s) for s in states})
    for s in rows:
        if len(s) != k:
            raise ValueError(f"state with {len(s)} photons in a {k}-photon layer")
    seqs = np.array(rows, dtype=np.int64).reshape(len(rows), k)
    return FockBasis(m, k, seqs)


def downward_closure(basis: FockBasis) -> FockBasis:
    """All states obtained by removing one photon from some state of ``basis``."""
    k = basis.k
    if k == 0:
        raise ValueError("the vacuum layer has no parents")
    if k == 1:
        return FockBasis(basis.m, 0, np.empty((1, 0), dtype=np.int64))
    seqs = basis.sequences
    reduced = np.concatenate([np.delete(seqs, i, axis=1) for i in range(k)])
    reduced = np.unique(reduced, axis=0)
    return FockBasis(basis.m, k - 1, np.ascontiguousarray(reduced, dtype=np.int64))


def index_width_bytes(parent_count: int) -> int:
    """Bytes per stored parent rank.

    Smallest width whose all-ones pattern is not a valid rank, so the sentinel
    never collides with a real index.
    """
    width = 1
    while 256**width <= parent_count:
        width += 1
    return width


@dataclass(frozen=True, eq=False)
class FockIndexMap:
    """Child-to-parent rank map between layer ``k`` and layer ``k - 1``.

    ``parent_indices[c, i]`` is the parent rank reached by removing one photon
    from the ``i``-th occupied mode of child ``c``; unused slots hold ``-1``.
    """

    m: int
    k: int
    parent_indices: np.ndarray
    index_width_bytes: int
    modes: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return self.parent_indices.shape[0]

    def parents_of(self, child_rank: int) -> list[tuple[int, int]]:
        """``(mode, parent_rank)`` pairs of one child."""
        row = self.parent_indices[child_rank]
        return [(int(self.modes[child_rank, i]), int(row[i])) for i in range(self.k) if row[i] >= 0]

    def same_structure(self, other: "FockIndexMap") -> bool:
        return (
            self.m == other.m
            and self.k == other.k
            and self.index_width_bytes == other.index_width_bytes
            and np.array_equal(self.parent_indices, other.parent_indices)
        )


def index_map_from_ranks(child: FockBasis, parent_indices: np.ndarray, width: int) -> FockIndexMap:
    modes, counts = kernels.slot_layout(child.sequences)
    if parent_indices.shape != modes.shape or np.any((modes >= 0) != (parent_indices >= 0)):
        raise StructureError("parent slots do not match the occupied modes of the child basis")
    for arr in (parent_indices, modes, counts):
        arr.setflags(write=False)
    return FockIndexMap(child.m, child.k, parent_indices, width, modes, counts)


def build_index_map(child: FockBasis, parent: FockBasis) -> FockIndexMap:
    if child.m != parent.m or child.k != parent.k + 1:
        raise StructureError(
            f"layers do not chain: child (m={child.m}, k={child.k}), parent (m={parent.m}, k={parent.k})"
        )
    if child.k == 0:
        raise StructureError("the vacuum layer has no parents")
    parents = kernels.parent_ranks(child.sequences, parent.sequences)
    modes, counts = kernels.slot_layout(child.sequences)
    if np.any((modes >= 0) & (parents < 0)):
        bad = int(np.argwhere((modes >= 0) & (parents < 0))[0, 0])
        raise StructureError(f"parent of {child.state_at(bad)} missing from the parent basis")
    for arr in (parents, modes, counts):
        arr.setflags(write=False)
    return FockIndexMap(child.m, child.k, parents, index_width_bytes(parent.count), modes, counts)


@dataclass(frozen=True)
class LayerStructures:
    """Bases for layers ``0..n`` and index maps for layers ``1..n``."""

    m: int
    n: int
    bases: tuple[FockBasis, ...]
    maps: tuple[FockIndexMap | None, ...]


def build_layer_structures(m: int, n: int, mask: MaskSet | None = None) -> LayerStructures:
    bases = tuple(build_basis(m, k, mask) for k in range(n + 1))
    maps = (None,) + tuple(build_index_map(bases[k], bases[k - 1]) for k in range(1, n + 1))
    return LayerStructures(m, n, bases, maps)


@lru_cache(maxsize=16)
def layer_structures(m: int, n: int) -> LayerStructures:
    """Cached unmasked structures; they depend only on ``(m, n)``."""
    return build_layer_structures(m, n)
