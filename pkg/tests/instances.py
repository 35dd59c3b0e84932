"""Seeded small instances shared by the search tests and the acceptance suite."""

import numpy as np

from faultbasis.sigmatrix import Signature, VerdictMatrix
from faultbasis.synth import SynthSpec, synth


def _span_rows(rng, basis, count):
    """``count`` distinct nonzero XOR combinations of ``basis``, always containing the basis itself."""
    r = len(basis)
    combos = {}
    for mask in range(1, 1 << r):
        v = 0
        for k in range(r):
            if mask >> k & 1:
                v ^= basis[k]
        combos[mask] = v
    singles = [1 << k for k in range(r)]
    others = [m for m in combos if m not in singles]
    picked = singles + list(rng.choice(others, size=min(count - r, len(others)), replace=False))
    return [combos[int(m)] for m in picked]


def planted_instance(seed: int) -> VerdictMatrix:
    """Rank <= 4, d <= 16, at most 12 unique rows.

    Even seeds use a disjoint planted basis (optimum F = 0) plus dependent rows;
    odd seeds plant random overlapping independent rows, so the optimum is
    usually positive and the search has real work to do.
    """
    rng = np.random.default_rng(seed)
    r = int(rng.integers(2, 5))
    d = int(rng.integers(max(r, 6), 17))
    if seed % 2 == 0:
        spec = SynthSpec(planted_rank=r, d=d, extra_dependent_rows=int(rng.integers(2, 13 - r)),
                         overlap_bias=float(rng.uniform(0.2, 0.8)), seed=seed)
        M = synth(spec, problem_id=f"planted{seed}").matrix
        # collapse duplicates so the 12-unique-row bound holds
        seen, keep = set(), []
        for i, row in enumerate(M.rows):
            if row.bits not in seen:
                seen.add(row.bits)
                keep.append(i)
        return M.take(keep)
    while True:
        density = rng.uniform(0.2, 0.6)
        basis = [sum(1 << j for j in range(d) if rng.random() < density) for _ in range(r)]
        if all(basis) and _rank(basis) == r:
            break
    count = int(rng.integers(r + 1, min(12, 2**r - 1) + 1))
    rows = _span_rows(rng, basis, count)
    rows = [rows[int(i)] for i in rng.permutation(len(rows))]
    return VerdictMatrix(f"planted{seed}", tuple(Signature(v, d) for v in rows),
                         tuple(f"w{i}" for i in range(len(rows))), d)


def _rank(vals):
    piv = {}
    for v in vals:
        while v:
            t = v.bit_length() - 1
            if t not in piv:
                piv[t] = v
                break
            v ^= piv[t]
    return len(piv)
