"""Numba-compiled loop kernels.

Everything is written against explicit ``uint64`` types: mixing signed and
unsigned integers makes numba promote to float64.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(cache=True, nogil=True)
def _popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, nogil=True)
def _jaccard(words, pop, a, b):
    inter = 0
    for w in range(words.shape[1]):
        inter += _popcount(words[a, w] & words[b, w])
    return inter / (pop[a] + pop[b] - inter)


@njit(cache=True, nogil=True)
def _has_bit(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & _ONE


@njit(cache=True, nogil=True)
def _lowest_bit(row):
    for w in range(row.shape[0]):
        x = row[w]
        if x != _ZERO:
            low = x & (~x + _ONE)
            return w * 64 + _popcount(low - _ONE)
    return -1


@njit(cache=True, nogil=True)
def greedy_basis(words, order, target):
    """Walk ``order`` and keep each row that is independent of those kept; stop at ``target``."""
    W = words.shape[1]
    ech = np.zeros((max(target, 1), W), dtype=np.uint64)
    piv = np.empty(max(target, 1), dtype=np.int64)
    chosen = np.empty(target, dtype=np.int64)
    k = 0
    v = np.empty(W, dtype=np.uint64)
    for idx in order:
        if k == target:
            break
        for w in range(W):
            v[w] = words[idx, w]
        for q in range(k):
            if _has_bit(v, piv[q]):
                for w in range(W):
                    v[w] ^= ech[q, w]
        col = _lowest_bit(v)
        if col >= 0:
            ech[k, :] = v
            piv[k] = col
            chosen[k] = idx
            k += 1
    return np.sort(chosen[:k])


@njit(cache=True, nogil=True)
def _coefficients(words, cur):
    """GF(2) coordinates of every row with respect to the basis rows ``cur``.

    Returns an ``(n, ceil(R/64))`` uint64 array whose bit ``p`` of row ``c``
    says whether basis row ``cur[p]`` appears in the combination giving ``c``.
    """
    n, W = words.shape
    R = cur.shape[0]
    WR = (R + 63) // 64
    ech = np.empty((R, W), dtype=np.uint64)
    trk = np.zeros((R, WR), dtype=np.uint64)
    piv = np.empty(R, dtype=np.int64)
    for p in range(R):
        for w in range(W):
            ech[p, w] = words[cur[p], w]
        trk[p, p >> 6] = _ONE << np.uint64(p & 63)
        for q in range(p):
            if _has_bit(ech[p], piv[q]):
                for w in range(W):
                    ech[p, w] ^= ech[q, w]
                for w in range(WR):
                    trk[p, w] ^= trk[q, w]
        piv[p] = _lowest_bit(ech[p])
    out = np.zeros((n, WR), dtype=np.uint64)
    v = np.empty(W, dtype=np.uint64)
    for c in range(n):
        for w in range(W):
            v[w] = words[c, w]
        for q in range(R):
            if _has_bit(v, piv[q]):
                for w in range(W):
                    v[w] ^= ech[q, w]
                for w in range(WR):
                    out[c, w] ^= trk[q, w]
    return out


@njit(cache=True, nogil=True)
def local_search(words, pop, basis, max_steps, early_stop, eps):
    """Best-improvement swap descent from ``basis`` (sorted row indices).

    Returns ``(final_basis, f_history, steps, termination)``; ``f_history[s]``
    is the average pairwise Jaccard value after ``s`` accepted swaps.
    """
    n = words.shape[0]
    R = basis.shape[0]
    npairs = R * (R - 1) // 2
    cur = np.sort(basis.copy())
    in_basis = np.zeros(n, dtype=np.bool_)
    for p in range(R):
        in_basis[cur[p]] = True
    hist = np.empty(max_steps + 1, dtype=np.float64)
    JI = np.empty((R, n), dtype=np.float64)
    A = np.empty(n, dtype=np.float64)
    steps = 0
    term = 0
    while True:
        for c in range(n):
            A[c] = 0.0
        for p in range(R):
            for c in range(n):
                j = _jaccard(words, pop, cur[p], c)
                JI[p, c] = j
                A[c] += j
        S = 0.0
        for p in range(R):
            A[cur[p]] -= 1.0
            S += A[cur[p]]
        S *= 0.5
        hist[steps] = S / npairs if npairs > 0 else 0.0
        if early_stop and S <= eps:
            term = 2
            break
        if steps == max_steps:
            term = 1
            break

        coef = _coefficients(words, cur)
        best = np.inf
        for p in range(R):
            a_out = A[cur[p]]
            for c in range(n):
                if in_basis[c] or not _has_bit(coef[c], p):
                    continue
                val = S - a_out + A[c] - JI[p, c]
                if val < best:
                    best = val
        if not best < S - eps:
            term = 0
            break
        out_p = -1
        in_c = -1
        for p in range(R):
            a_out = A[cur[p]]
            for c in range(n):
                if in_basis[c] or not _has_bit(coef[c], p):
                    continue
                if S - a_out + A[c] - JI[p, c] <= best + eps:
                    out_p = p
                    in_c = c
                    break
            if out_p >= 0:
                break
        in_basis[cur[out_p]] = False
        in_basis[in_c] = True
        cur[out_p] = in_c
        cur.sort()
        steps += 1
    return cur, hist[:steps + 1].copy(), steps, term
