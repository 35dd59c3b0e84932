"""Pure-numpy kernels, semantically identical to :mod:`.loops`."""

import numpy as np

_ONE = np.uint64(1)


def _bit(rows: np.ndarray, j: int) -> np.ndarray:
    return ((rows[..., j >> 6] >> np.uint64(j & 63)) & _ONE).astype(bool)


def _lowest_bit(row: np.ndarray) -> int:
    nz = np.flatnonzero(row)
    if nz.size == 0:
        return -1
    w = int(nz[0])
    x = int(row[w])
    return w * 64 + ((x & -x).bit_length() - 1)


def greedy_basis(words, order, target):
    ech, piv, chosen = [], [], []
    for idx in order:
        if len(chosen) == target:
            break
        v = words[idx].copy()
        for e, col in zip(ech, piv):
            if _bit(v, col):
                v ^= e
        col = _lowest_bit(v)
        if col >= 0:
            ech.append(v)
            piv.append(col)
            chosen.append(idx)
    return np.sort(np.asarray(chosen, dtype=np.int64))


def _coefficients(words, cur):
    R = cur.shape[0]
    ech = words[cur].copy()
    trk = np.eye(R, dtype=bool)
    piv = np.empty(R, dtype=np.int64)
    for p in range(R):
        for q in range(p):
            if _bit(ech[p], piv[q]):
                ech[p] ^= ech[q]
                trk[p] ^= trk[q]
        piv[p] = _lowest_bit(ech[p])
    v = words.copy()
    coef = np.zeros((words.shape[0], R), dtype=bool)
    for q in range(R):
        hit = _bit(v, piv[q])
        v[hit] ^= ech[q]
        coef[hit] ^= trk[q]
    return coef


def _jaccard_rows(words, pop, cur):
    inter = np.bitwise_count(words[cur][:, None, :] & words[None, :, :]).sum(axis=-1, dtype=np.int64)
    return inter / (pop[cur][:, None] + pop[None, :] - inter)


def local_search(words, pop, basis, max_steps, early_stop, eps):
    n = words.shape[0]
    R = basis.shape[0]
    npairs = R * (R - 1) // 2
    cur = np.sort(np.asarray(basis, dtype=np.int64))
    in_basis = np.zeros(n, dtype=bool)
    in_basis[cur] = True
    hist = []
    steps = 0
    while True:
        JI = _jaccard_rows(words, pop, cur)
        A = JI.sum(axis=0)
        A[cur] -= 1.0
        S = 0.5 * A[cur].sum()
        hist.append(S / npairs if npairs else 0.0)
        if early_stop and S <= eps:
            term = 2
            break
        if steps == max_steps:
            term = 1
            break
        coef = _coefficients(words, cur)
        admissible = coef.T & ~in_basis[None, :]
        val = S - A[cur][:, None] + A[None, :] - JI
        val = np.where(admissible, val, np.inf)
        best = val.min() if val.size else np.inf
        if not best < S - eps:
            term = 0
            break
        out_p, in_c = np.unravel_index(np.argmax(val <= best + eps), val.shape)
        in_basis[cur[out_p]] = False
        in_basis[in_c] = True
        cur[out_p] = in_c
        cur.sort()
        steps += 1
    return cur, np.asarray(hist, dtype=np.float64), steps, term
