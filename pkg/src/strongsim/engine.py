"""Layered amplitude computation.

Photons are added to the input one at a time. Adding a photon in input mode
``p`` maps the output amplitudes of layer ``k - 1`` to layer ``k`` through

    <t|U|s + e_p> = 1/sqrt(s_p + 1) * sum_{j: t_j > 0} sqrt(t_j) U[j, p] <t - e_j|U|s>

Every layer is a normalized state, so each layer sums to one in probability.
Each product ``U[j, p] * <t - e_j|U|s>`` counts as one complex multiplication.
"""
from __future__ import annotations

import bisect
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import sqrt
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from . import kernels
from .fock import (
    FockBasis,
    FockState,
    LayerStructures,
    MaskSet,
    basis_from_states,
    build_basis,
    build_index_map,
    count_states,
    downward_closure,
    layer_structures,
    state_to_sequence,
)
from .schedule import build_schedule
from .unitary import as_unitary


class OpCounter:
    """Exact count of complex multiplications in the layer recurrences."""

    def __init__(self):
        self.count = 0

    def add(self, ops: int) -> None:
        self.count += int(ops)

    def reset(self) -> None:
        self.count = 0


default_counter = OpCounter()


def op_counter() -> int:
    return default_counter.count


def reset_op_counter() -> None:
    default_counter.reset()


@lru_cache(maxsize=None)
def _rank_rows(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    rows = []
    for r in range(k + 1):
        acc, row = 0, []
        for v in range(m + 1):
            row.append(acc)
            if v < m and r > 0:
                acc += count_states(m - v, r - 1)
        rows.append(tuple(row))
    return tuple(rows)


def _lex_rank(state: tuple[int, ...]) -> int:
    m, k = len(state), sum(state)
    table = _rank_rows(m, k)
    rank, prev, i = 0, 0, 0
    for mode, occ in enumerate(state):
        for _ in range(occ):
            row = table[k - i]
            rank += row[mode] - row[prev]
            prev = mode
            i += 1
    return rank


class AmplitudeStore:
    """Memoized coefficients ``<t|U|s>`` keyed by input state and output rank.

    The output rank is the position of ``t`` in its full unmasked layer, so
    entries stay valid across runs that restrict the layers differently. A
    present entry is a computed one and is never recomputed.
    """

    def __init__(self):
        self._data: dict[FockState, dict[int, complex]] = {}

    def lookup(self, node: FockState, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        table = self._data.get(node, {})
        values = np.zeros(len(keys), dtype=np.complex128)
        known = np.zeros(len(keys), dtype=bool)
        if table:
            for i, key in enumerate(keys.tolist()):
                v = table.get(key)
                if v is not None:
                    values[i] = v
                    known[i] = True
        return values, known

    def insert(self, node: FockState, keys: Iterable[int], values: Iterable[complex]) -> None:
        table = self._data.setdefault(node, {})
        for key, value in zip(keys, values):
            table[int(key)] = complex(value)

    def get(self, node: FockState, state: Sequence[int]) -> complex | None:
        return self._data.get(node, {}).get(_lex_rank(tuple(state)))

    def put(self, node: FockState, state: Sequence[int], value: complex) -> None:
        self._data.setdefault(node, {})[_lex_rank(tuple(state))] = value

    def is_computed(self, node: FockState, state: Sequence[int]) -> bool:
        return self.get(node, state) is not None

    def size(self, node: FockState | None = None) -> int:
        if node is None:
            return sum(len(t) for t in self._data.values())
        return len(self._data.get(node, {}))

    def nodes(self) -> list[FockState]:
        return list(self._data)


@dataclass
class Distribution:
    """Amplitudes over an ordered set of output states."""

    m: int
    n: int
    basis: FockBasis
    amplitudes: np.ndarray
    layers: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def states(self) -> list[FockState]:
        return self.basis.states()

    def __len__(self) -> int:
        return self.basis.count

    def __iter__(self) -> Iterator[tuple[FockState, complex, float]]:
        probs = self.probabilities
        for i, state in enumerate(self.states()):
            yield state, complex(self.amplitudes[i]), float(probs[i])

    def amplitude(self, state: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.rank(state)])

    def probability(self, state: Sequence[int]) -> float:
        return abs(self.amplitude(state)) ** 2

    def as_dict(self) -> dict[FockState, complex]:
        return {state: amp for state, amp, _ in self}


def _photon_order(s: FockState, order: Sequence[int] | None) -> list[int]:
    base = list(state_to_sequence(s))
    if order is None:
        return base
    order = [int(p) for p in order]
    if sorted(order) != base:
        raise ValueError(f"order {order} is not an arrangement of the photons of {s}")
    return order


def _gather(index_map, parent_amp, ucol, scale, out, rows, threads):
    if threads <= 1 or rows.shape[0] < 2 * threads:
        return kernels.gather_rows(
            index_map.parent_indices, index_map.modes, index_map.counts,
            parent_amp, ucol, scale, out, rows,
        )
    chunks = np.array_split(rows, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = pool.map(
            lambda chunk: kernels.gather_rows(
                index_map.parent_indices, index_map.modes, index_map.counts,
                parent_amp, ucol, scale, out, chunk,
            ),
            chunks,
        )
        return sum(results)


def slos_full(
    s: Sequence[int],
    U,
    keep_layers: bool = True,
    order: Sequence[int] | None = None,
    check_unitary: bool = True,
    threads: int = 1,
    structures: LayerStructures | None = None,
    counter: OpCounter | None = None,
) -> Distribution:
    """All output amplitudes of input ``s``.

    ``order`` fixes the sequence of input modes in which photons are added
    (default: lowest mode first). With ``keep_layers`` every intermediate layer
    is returned in ``Distribution.layers``; otherwise only two layers are held
    in memory at a time.
    """
    s = FockState(s)
    U = as_unitary(U, check_unitary)
    m, n = s.m, s.n
    if U.shape[0] != m:
        raise ValueError(f"state has {m} modes, unitary is {U.shape[0]}x{U.shape[0]}")
    counter = counter or default_counter
    structures = structures or layer_structures(m, n)
    if structures.m != m or structures.n < n:
        raise ValueError("precomputed structures do not cover this (m, n)")

    amp = np.ones(1, dtype=np.complex128)
    layers = [amp] if keep_layers else None
    occ = [0] * m
    for k, p in enumerate(_photon_order(s, order), start=1):
        occ[p] += 1
        index_map = structures.maps[k]
        out = np.empty(structures.bases[k].count, dtype=np.complex128)
        rows = np.arange(out.shape[0], dtype=np.int64)
        ucol = np.ascontiguousarray(U[:, p])
        counter.add(_gather(index_map, amp, ucol, 1.0 / sqrt(occ[p]), out, rows, threads))
        amp = out
        if keep_layers:
            layers.append(amp)
    return Distribution(m, n, structures.bases[n], amp, layers)


class GenResult(Mapping):
    """Amplitudes ``<t|U|s>`` keyed by ``(s, t)``, plus run statistics."""

    def __init__(self, values: dict, layer_sizes: list[int], multiplications: int):
        self._values = values
        self.layer_sizes = layer_sizes
        self.multiplications = multiplications

    def __getitem__(self, key):
        s, t = key
        return self._values[(FockState(s), FockState(t))]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def matrix(self, inputs: Sequence, outputs: Sequence) -> np.ndarray:
        """Block with rows indexed by ``outputs`` and columns by ``inputs``."""
        return np.array([[self[(s, t)] for s in inputs] for t in outputs], dtype=np.complex128)


def _repetition(state: Sequence[int]) -> int:
    return sum(state) - sum(1 for x in state if x)


def _output_basis(outputs, m: int, n: int) -> FockBasis:
    if isinstance(outputs, MaskSet):
        top = build_basis(m, n, outputs)
    else:
        outs = [FockState(t) for t in outputs]
        if any(t.m != m for t in outs):
            raise ValueError("outputs must have the same number of modes as the inputs")
        if any(t.n != n for t in outs):
            raise ValueError("outputs must have the same photon count as the inputs")
        top = basis_from_states(outs, m, n)
    if top.count == 0:
        raise ValueError("the output set is empty")
    return top


def restricted_layers(top: FockBasis) -> list[FockBasis]:
    """Downward closures of ``top`` for every photon count ``0..k``."""
    bases = [top]
    while bases[-1].k > 0:
        bases.append(downward_closure(bases[-1]))
    return bases[::-1]


def slos_gen(
    inputs: Iterable[Sequence[int]],
    outputs: Union[Iterable[Sequence[int]], MaskSet],
    U,
    store: AmplitudeStore | None = None,
    check_unitary: bool = True,
    conjugate_trick: bool = False,
    counter: OpCounter | None = None,
) -> GenResult:
    """Amplitudes between a set of inputs and a set of outputs (or a mask).

    Only the states below some requested output are visited, and inputs
    share the computation of their common factors. Pass the same ``store``
    to several calls to reuse already computed coefficients.
    """
    ins = [FockState(s) for s in inputs]
    if not ins:
        raise ValueError("need at least one input state")
    m, n = ins[0].m, ins[0].n
    if any(s.m != m or s.n != n for s in ins):
        raise ValueError("all inputs must share the same mode and photon counts")
    U = as_unitary(U, check_unitary)
    if U.shape[0] != m:
        raise ValueError(f"states have {m} modes, unitary is {U.shape[0]}x{U.shape[0]}")
    counter = counter or default_counter
    top = _output_basis(outputs, m, n)

    if conjugate_trick and len(ins) == 1 and top.count == 1:
        s, t = ins[0], top.state_at(0)
        if _repetition(s) > _repetition(t):
            flipped = slos_gen([t], [s], U.conj().T, check_unitary=False, counter=counter)
            return GenResult(
                {(s, t): np.conj(flipped[(t, s)])}, flipped.layer_sizes, flipped.multiplications
            )

    store = store if store is not None else AmplitudeStore()
    schedule = build_schedule(ins)
    producers = schedule.producers()
    nodes = schedule.nodes()
    bases = restricted_layers(top)
    start = counter.count

    vacuum = FockState.vacuum(m)
    store.insert(vacuum, [0], [1.0])
    parent_keys = np.zeros(1, dtype=np.int64)
    for k in range(1, n + 1):
        basis = bases[k]
        index_map = build_index_map(basis, bases[k - 1])
        keys = basis.global_ranks()
        for node in nodes[k]:
            parent, p = producers[node]
            parent_amp, known_parent = store.lookup(parent, parent_keys)
            assert known_parent.all()
            amp, known = store.lookup(node, keys)
            todo = np.flatnonzero(~known)
            if todo.size:
                ucol = np.ascontiguousarray(U[:, p])
                counter.add(
                    kernels.gather_rows(
                        index_map.parent_indices, index_map.modes, index_map.counts,
                        parent_amp, ucol, 1.0 / sqrt(node[p]), amp, todo,
                    )
                )
                store.insert(node, keys[todo].tolist(), amp[todo].tolist())
        parent_keys = keys

    final_amp = {}
    top_keys = bases[n].global_ranks()
    states = top.states()
    for s in schedule.targets:
        amp, _ = store.lookup(s, top_keys)
        for t, a in zip(states, amp):
            final_amp[(s, t)] = complex(a)
    return GenResult(final_amp, [b.count for b in bases], counter.count - start)


class _AmplitudeOracle:
    """Lazily computed ``<t|U|S>`` for partial inputs ``S``, memoized in a store.

    ``removal`` maps a partial input to the mode of its last added photon;
    by default the highest occupied mode is removed first.
    """

    def __init__(self, U, store: AmplitudeStore, counter: OpCounter, removal=None):
        self.U = U
        self.store = store
        self.counter = counter
        self.removal = removal or {}
        self.m = U.shape[0]

    def __call__(self, S: FockState, t: tuple[int, ...]) -> complex:
        if sum(S) == 0:
            return 1.0 + 0j
        cached = self.store.get(S, t)
        if cached is not None:
            return cached
        p = self.removal.get(S)
        if p is None:
            p = max(i for i, x in enumerate(S) if x)
        parent = FockState(x - (i == p) for i, x in enumerate(S))
        acc = 0j
        ops = 0
        tl = list(t)
        for j in range(self.m):
            if tl[j]:
                tl[j] -= 1
                acc += (self.U[j, p] * sqrt(tl[j] + 1)) * self(parent, tuple(tl))
                tl[j] += 1
                ops += 1
        self.counter.add(ops)
        value = acc * (1.0 / sqrt(S[p]))
        self.store.put(S, t, value)
        return value


@dataclass(frozen=True)
class Threshold:
    """Select the most probable outputs until their total probability exceeds ``eta``."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class Restricted:
    """Select a fixed output set, given as explicit states or a mask."""

    allowed: Union[MaskSet, tuple]


@dataclass(frozen=True)
class SampleChain:
    """Select a single output drawn from the output distribution."""

    seed: int


SelectPolicy = Union[Threshold, Restricted, SampleChain]


@dataclass
class HybridResult:
    selected: list[FockState]
    distribution: Distribution

    @property
    def cumulative_probability(self) -> float:
        return float(self.distribution.probabilities.sum())


def _children(states: Iterable[tuple], m: int) -> set[tuple]:
    out = set()
    for t in states:
        for i in range(m):
            out.add(tuple(x + (j == i) for j, x in enumerate(t)))
    return out


def _pop_until(candidates: list[tuple], probs: dict, eta: float) -> list[tuple]:
    ordered = sorted(candidates, key=lambda t: (-probs[t], state_to_sequence(t)))
    if eta >= 1.0:
        return [t for t in ordered if probs[t] > 0.0] or ordered
    picked, total = [], 0.0
    for t in ordered:
        if total > eta:
            break
        picked.append(t)
        total += probs[t]
    return picked


def slos_hybrid(
    s: Sequence[int],
    U,
    policy: SelectPolicy,
    order: Sequence[int] | None = None,
    store: AmplitudeStore | None = None,
    check_unitary: bool = True,
    counter: OpCounter | None = None,
) -> HybridResult:
    """Amplitudes of an adaptively selected output set.

    With :class:`Threshold`, each layer keeps its most probable states until
    their probability exceeds ``eta`` and only their children are computed
    at the next layer; missing parents are filled in recursively. If the
    last layer falls short of ``eta`` the intermediate thresholds are raised
    and the selection is redone, reusing every stored coefficient.
    """
    s = FockState(s)
    U = as_unitary(U, check_unitary)
    m, n = s.m, s.n
    if U.shape[0] != m:
        raise ValueError(f"state has {m} modes, unitary is {U.shape[0]}x{U.shape[0]}")
    counter = counter or default_counter

    if isinstance(policy, Restricted):
        allowed = policy.allowed
        outputs = allowed if isinstance(allowed, MaskSet) else [FockState(t) for t in allowed]
        res = slos_gen([s], outputs, U, store=store, check_unitary=False, counter=counter)
        top = _output_basis(outputs, m, n)
        states = top.states()
        amps = np.array([res[(s, t)] for t in states], dtype=np.complex128)
        return HybridResult(states, Distribution(m, n, top, amps))

    if isinstance(policy, SampleChain):
        t = sample(s, U, 1, policy.seed, check_unitary=False, store=store, counter=counter)[0]
        return slos_hybrid(s, U, Restricted((t,)), store=store, check_unitary=False, counter=counter)

    if not isinstance(policy, Threshold):
        raise TypeError(f"unknown select policy {policy!r}")

    store = store if store is not None else AmplitudeStore()
    photons = _photon_order(s, order)
    prefixes = [FockState.vacuum(m)]
    removal = {}
    for p in photons:
        prefixes.append(prefixes[-1].add(p))
        removal[prefixes[-1]] = p
    amplitude = _AmplitudeOracle(U, store, counter, removal)

    eta = policy.eta
    inner = eta
    while True:
        candidates = [tuple(prefixes[0])]
        probs = {candidates[0]: 1.0}
        for k in range(1, n + 1):
            popped = _pop_until(candidates, probs, inner)
            candidates = sorted(_children(popped, m), key=state_to_sequence)
            probs = {t: abs(amplitude(prefixes[k], t)) ** 2 for t in candidates}
        selected = _pop_until(candidates, probs, eta)
        total = sum(probs[t] for t in selected)
        if total > eta or eta >= 1.0 or inner >= 1.0:
            break
        inner = 1.0 if inner > 1.0 - 1e-6 else 1.0 - (1.0 - inner) / 4.0

    states = [FockState(t) for t in selected]
    basis = basis_from_states(states, m, n)
    amps = np.array([amplitude(s, tuple(t)) for t in basis.states()], dtype=np.complex128)
    return HybridResult(states, Distribution(m, n, basis, amps))


_SAMPLE_CHUNK = 4096


def sample(
    s: Sequence[int],
    U,
    count: int,
    seed: int,
    check_unitary: bool = True,
    store: AmplitudeStore | None = None,
    counter: OpCounter | None = None,
) -> list[FockState]:
    """Exact samples from the output distribution of ``s``.

    Each sample adds the input photons in a fresh uniformly random order and
    places them one at a time: given the partial output ``t`` and partial
    input ``S``, the next photon lands in mode ``j`` with probability
    proportional to ``(t_j + 1) |<t + e_j|U|S>|^2``. Sample ``i`` depends only
    on ``seed`` and ``i``.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    s = FockState(s)
    U = as_unitary(U, check_unitary)
    m, n = s.m, s.n
    if U.shape[0] != m:
        raise ValueError(f"state has {m} modes, unitary is {U.shape[0]}x{U.shape[0]}")
    if n == 0:
        return [s] * count
    counter = counter or default_counter
    amplitude = _AmplitudeOracle(U, store if store is not None else AmplitudeStore(), counter)
    photons = np.array(state_to_sequence(s), dtype=np.int64)
    transitions: dict = {}

    def transition(S: FockState, t: tuple) -> tuple[list[float], list[tuple]]:
        weights, nexts = [], []
        for j in range(m):
            child = t[:j] + (t[j] + 1,) + t[j + 1 :]
            weights.append((t[j] + 1) * abs(amplitude(S, child)) ** 2)
            nexts.append(child)
        cum = list(np.cumsum(weights))
        return cum, nexts

    rng = np.random.default_rng(seed)
    out: list[FockState] = []
    vacuum = tuple([0] * m)
    for start in range(0, count, _SAMPLE_CHUNK):
        rows = rng.random((min(_SAMPLE_CHUNK, count - start), 2 * n))
        orders = photons[np.argsort(rows[:, :n], axis=1)].tolist()
        uniforms = rows[:, n:].tolist()
        for order, us in zip(orders, uniforms):
            S = FockState.vacuum(m)
            t = vacuum
            for p, u in zip(order, us):
                S = S.add(p)
                key = (S, t)
                step = transitions.get(key)
                if step is None:
                    step = transitions[key] = transition(S, t)
                cum, nexts = step
                idx = bisect.bisect_right(cum, u * cum[-1])
                t = nexts[min(idx, m - 1)]
            out.append(FockState(t))
    return out
