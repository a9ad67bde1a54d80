"""Loop kernels compiled with numba."""
import numpy as np
from numba import njit


@njit(cache=True)
def enumerate_sequences(m, k, count):
    out = np.empty((count, k), dtype=np.int64)
    if k == 0:
        return out
    cur = np.zeros(k, dtype=np.int64)
    for r in range(count):
        out[r, :] = cur
        i = k - 1
        while i >= 0 and cur[i] == m - 1:
            i -= 1
        if i < 0:
            break
        v = cur[i] + 1
        for j in range(i, k):
            cur[j] = v
    return out


@njit(cache=True)
def _cmp_row(table, idx, query):
    k = query.shape[0]
    for j in range(k):
        a = table[idx, j]
        b = query[j]
        if a < b:
            return -1
        if a > b:
            return 1
    return 0


@njit(cache=True)
def search_sequences(table, queries):
    n_rows = table.shape[0]
    out = np.empty(queries.shape[0], dtype=np.int64)
    for q in range(queries.shape[0]):
        lo = 0
        hi = n_rows
        found = -1
        while lo < hi:
            mid = (lo + hi) // 2
            c = _cmp_row(table, mid, queries[q])
            if c == 0:
                found = mid
                break
            if c < 0:
                lo = mid + 1
            else:
                hi = mid
        out[q] = found
    return out


@njit(cache=True)
def slot_layout(seqs):
    count, k = seqs.shape
    modes = np.full((count, k), -1, dtype=np.int64)
    counts = np.zeros((count, k), dtype=np.int64)
    for r in range(count):
        slot = -1
        prev = -1
        for i in range(k):
            v = seqs[r, i]
            if v != prev:
                slot += 1
                modes[r, slot] = v
                prev = v
            counts[r, slot] += 1
    return modes, counts


@njit(cache=True)
def parent_ranks(child, parent_table):
    count, k = child.shape
    parents = np.full((count, k), -1, dtype=np.int64)
    query = np.empty(max(k - 1, 0), dtype=np.int64)
    single = np.empty((1, max(k - 1, 0)), dtype=np.int64)
    for r in range(count):
        slot = 0
        for i in range(k):
            if i > 0 and child[r, i] == child[r, i - 1]:
                continue
            w = 0
            for j in range(k):
                if j != i:
                    query[w] = child[r, j]
                    w += 1
            single[0, :] = query
            parents[r, slot] = search_sequences(parent_table, single)[0]
            slot += 1
    return parents


@njit(cache=True, nogil=True)
def gather_rows(parents, modes, counts, parent_amp, ucol, scale, out, rows):
    k = parents.shape[1]
    ops = 0
    for idx in range(rows.shape[0]):
        r = rows[idx]
        acc = 0j
        for i in range(k):
            j = modes[r, i]
            if j < 0:
                break
            coeff = ucol[j] * np.sqrt(counts[r, i])
            acc += coeff * parent_amp[parents[r, i]]
            ops += 1
        out[r] = acc * scale
    return ops


@njit(cache=True)
def ryser(a):
    n = a.shape[0]
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0j
    mults = 0
    in_set = np.zeros(n, dtype=np.bool_)
    size = 0
    for g in range(1, 1 << n):
        j = 0
        while not (g >> j) & 1:
            j += 1
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(n):
                rowsum[i] -= a[i, j]
        else:
            in_set[j] = True
            size += 1
            for i in range(n):
                rowsum[i] += a[i, j]
        prod = 1.0 + 0j
        for i in range(n):
            prod *= rowsum[i]
        mults += n
        if size & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        total = -total
    return total, mults


@njit(cache=True)
def glynn(a):
    n = a.shape[0]
    colsum = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            colsum[j] += a[i, j]
    negated = np.zeros(n, dtype=np.bool_)
    sign = 1
    total = 0j
    mults = 0
    for g in range(1 << (n - 1)):
        if g > 0:
            b = 0
            while not (g >> b) & 1:
                b += 1
            row = b + 1
            if negated[row]:
                negated[row] = False
                for j in range(n):
                    colsum[j] += 2.0 * a[row, j]
            else:
                negated[row] = True
                for j in range(n):
                    colsum[j] -= 2.0 * a[row, j]
            sign = -sign
        prod = 1.0 + 0j
        for j in range(n):
            prod *= colsum[j]
        mults += n
        if sign > 0:
            total += prod
        else:
            total -= prod
    return total / (1 << (n - 1)), mults
