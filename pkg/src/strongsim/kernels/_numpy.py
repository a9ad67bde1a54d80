"""Vectorized numpy versions of the loop kernels.

Signatures match :mod:`strongsim.kernels._numba` so the two are interchangeable.
"""
from itertools import combinations_with_replacement

import numpy as np

_CHUNK = 1 << 14


def enumerate_sequences(m, k, count):
    if k == 0:
        return np.empty((1, 0), dtype=np.int64)
    flat = np.fromiter(
        (p for seq in combinations_with_replacement(range(m), k) for p in seq),
        dtype=np.int64,
        count=count * k,
    )
    return flat.reshape(count, k)


def _as_keys(rows):
    # Big-endian fixed-width bytes compare like the integer rows they encode.
    rows = np.ascontiguousarray(rows, dtype=">u2")
    return rows.view(f"S{2 * rows.shape[1]}").ravel()


def search_sequences(table, queries):
    out = np.full(queries.shape[0], -1, dtype=np.int64)
    if table.shape[0] == 0 or queries.shape[0] == 0:
        return out
    if table.shape[1] == 0:
        out[:] = 0
        return out
    keys = _as_keys(table)
    wanted = _as_keys(queries)
    pos = np.searchsorted(keys, wanted)
    inside = pos < keys.shape[0]
    hit = np.zeros_like(inside)
    hit[inside] = keys[pos[inside]] == wanted[inside]
    out[hit] = pos[hit]
    return out


def _first_of_run(seqs):
    first = np.ones(seqs.shape, dtype=bool)
    first[:, 1:] = seqs[:, 1:] != seqs[:, :-1]
    return first


def slot_layout(seqs):
    count, k = seqs.shape
    modes = np.full((count, k), -1, dtype=np.int64)
    counts = np.zeros((count, k), dtype=np.int64)
    if k == 0:
        return modes, counts
    first = _first_of_run(seqs)
    slot = np.cumsum(first, axis=1) - 1
    rows = np.broadcast_to(np.arange(count)[:, None], seqs.shape)
    modes[rows[first], slot[first]] = seqs[first]
    np.add.at(counts, (rows.ravel(), slot.ravel()), 1)
    return modes, counts


def parent_ranks(child, parent_table):
    count, k = child.shape
    parents = np.full((count, k), -1, dtype=np.int64)
    if k == 0:
        return parents
    first = _first_of_run(child)
    slot = np.cumsum(first, axis=1) - 1
    for i in range(k):
        sel = first[:, i]
        if not sel.any():
            continue
        reduced = np.delete(child[sel], i, axis=1)
        parents[sel, slot[sel, i]] = search_sequences(parent_table, reduced)
    return parents


def gather_rows(parents, modes, counts, parent_amp, ucol, scale, out, rows):
    k = parents.shape[1]
    sub_modes = modes[rows]
    sub_parents = parents[rows]
    sub_counts = counts[rows]
    acc = np.zeros(rows.shape[0], dtype=np.complex128)
    ops = 0
    for i in range(k):
        valid = sub_modes[:, i] >= 0
        if not valid.any():
            break
        coeff = ucol[sub_modes[valid, i]] * np.sqrt(sub_counts[valid, i])
        acc[valid] += coeff * parent_amp[sub_parents[valid, i]]
        ops += int(valid.sum())
    out[rows] = acc * scale
    return ops


def _gray_steps(n_bits, start, stop):
    g = np.arange(start, stop, dtype=np.int64)
    low = g & -g
    bit = np.log2(low).astype(np.int64)
    gray = g ^ (g >> 1)
    entering = ((gray >> bit) & 1).astype(bool)
    return bit, entering, gray


def _popcount(x):
    x = x.copy()
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x >>= 1
    return c


def ryser(a):
    n = a.shape[0]
    total = 0j
    rowsum = np.zeros(n, dtype=np.complex128)
    end = 1 << n
    for start in range(1, end, _CHUNK):
        stop = min(start + _CHUNK, end)
        bit, entering, gray = _gray_steps(n, start, stop)
        steps = np.where(entering[:, None], a.T[bit], -a.T[bit])
        sums = rowsum + np.cumsum(steps, axis=0)
        rowsum = sums[-1].copy()
        signs = np.where(_popcount(gray) & 1, -1.0, 1.0)
        total += np.dot(signs, np.prod(sums, axis=1))
    if n & 1:
        total = -total
    return complex(total), n * (end - 1)


def glynn(a):
    n = a.shape[0]
    colsum = a.sum(axis=0)
    prods = np.prod(colsum)
    total = complex(prods)
    end = 1 << (n - 1)
    for start in range(1, end, _CHUNK):
        stop = min(start + _CHUNK, end)
        bit, entering, gray = _gray_steps(n - 1, start, stop)
        rows = a[bit + 1]
        steps = np.where(entering[:, None], -2.0 * rows, 2.0 * rows)
        sums = colsum + np.cumsum(steps, axis=0)
        colsum = sums[-1].copy()
        signs = np.where(_popcount(gray) & 1, -1.0, 1.0)
        total += complex(np.dot(signs, np.prod(sums, axis=1)))
    return total / end, n * end
