"""Computation paths shared between several input states.

Inputs that have photons in common modes share the amplitudes of their common
factor. The schedule is built greedily: repeatedly pick the pair with the
largest overlap, replace it with its componentwise minimum and record the
photon additions that lead from the factor back to each member of the pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .fock import FockState, state_to_sequence

Entry = tuple[FockState, int]


def common_factor(s: Sequence[int], t: Sequence[int]) -> tuple[FockState, int]:
    if len(s) != len(t):
        raise ValueError("states must have the same number of modes")
    factor = FockState(min(a, b) for a, b in zip(s, t))
    return factor, factor.n


def path(start: Sequence[int], end: Sequence[int]) -> list[Entry]:
    """Photon additions turning ``start`` into ``end``, lowest mode first."""
    if len(start) != len(end) or any(a > b for a, b in zip(start, end)):
        raise ValueError(f"{tuple(start)} is not below {tuple(end)}")
    current = FockState(start)
    steps = []
    for mode, (a, b) in enumerate(zip(start, end)):
        for _ in range(b - a):
            steps.append((current, mode))
            current = current.add(mode)
    return steps


def _canonical(state: Sequence[int]) -> tuple:
    return (sum(state), state_to_sequence(state))


@dataclass(frozen=True)
class InputSchedule:
    """Per-layer ``(state, mode)`` additions that build every target input.

    ``layers[k]`` holds the additions applied to ``k``-photon states; ``n`` is
    the largest photon count among the targets.
    """

    m: int
    n: int
    layers: tuple[tuple[Entry, ...], ...]
    roots: tuple[FockState, ...]
    targets: tuple[FockState, ...]

    def __len__(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def producers(self) -> dict[FockState, Entry]:
        """Map each reachable non-vacuum state to the addition that creates it."""
        out: dict[FockState, Entry] = {}
        for layer in self.layers:
            for state, mode in layer:
                out.setdefault(state.add(mode), (state, mode))
        return out

    def nodes(self) -> list[list[FockState]]:
        """States reached at each photon count ``0..n``, canonically ordered."""
        per_layer: list[set] = [set() for _ in range(self.n + 1)]
        per_layer[0].add(FockState.vacuum(self.m))
        for k, layer in enumerate(self.layers):
            for state, mode in layer:
                per_layer[k].add(state)
                per_layer[k + 1].add(state.add(mode))
        return [sorted(nodes, key=_canonical) for nodes in per_layer]

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "n": self.n,
                "layers": [
                    [{"state": list(state), "mode": mode} for state, mode in layer]
                    for layer in self.layers
                ],
            },
            indent=1,
        )


def build_schedule(inputs: Iterable[Sequence[int]]) -> InputSchedule:
    pending = {FockState(s) for s in inputs}
    if not pending:
        raise ValueError("need at least one input state")
    ms = {s.m for s in pending}
    if len(ms) != 1:
        raise ValueError("all inputs must have the same number of modes")
    m, n = ms.pop(), max(s.n for s in pending)
    targets = tuple(sorted(pending, key=_canonical))
    layers: list[dict[Entry, None]] = [{} for _ in range(n)]
    roots: list[FockState] = []

    def emit(start: FockState, end: FockState) -> None:
        roots.append(start)
        for state, mode in path(start, end):
            layers[state.n][(state, mode)] = None

    vacuum = FockState.vacuum(m)
    while len(pending) >= 2:
        ordered = sorted(pending, key=_canonical)
        best, best_overlap = None, 0
        for i, s in enumerate(ordered):
            for t in ordered[i + 1 :]:
                overlap = sum(min(a, b) for a, b in zip(s, t))
                if overlap > best_overlap:
                    best, best_overlap = (s, t), overlap
        if best is None:
            for s in ordered:
                emit(vacuum, s)
            pending.clear()
            break
        factor, _ = common_factor(*best)
        for s in best:
            emit(factor, s)
            pending.discard(s)
        pending.add(factor)
    if pending:
        emit(vacuum, pending.pop())

    frozen = tuple(tuple(sorted(layer, key=lambda e: (_canonical(e[0]), e[1]))) for layer in layers)
    return InputSchedule(m, n, frozen, tuple(roots), targets)
