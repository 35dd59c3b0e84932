"""Synthetic verdict matrices with a planted, perfectly diverse basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleSpec
from .records import ProblemBundle
from .sigmatrix import Signature, Verdict, VerdictMatrix


@dataclass(frozen=True)
class SynthSpec:
    planted_rank: int
    d: int
    extra_dependent_rows: int = 0
    noise_rows: int = 0
    overlap_bias: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class SynthResult:
    matrix: VerdictMatrix
    planted: tuple[int, ...]  # row positions of the planted disjoint basis


def synth(spec: SynthSpec, problem_id: str = "synth") -> SynthResult:
    """Plant ``planted_rank`` rows with disjoint supports covering all ``d`` columns,
    then add XOR combinations of them and random noise rows, in shuffled order.

    Each planted row enters a dependent combination with probability
    ``overlap_bias``; at least two are always used so the combination is not a
    copy of a planted row.
    """
    r, d = spec.planted_rank, spec.d
    if d < 1 or r < 1:
        raise InfeasibleSpec("need d >= 1 and planted_rank >= 1")
    if r > d:
        raise InfeasibleSpec(f"{r} rows with disjoint nonempty supports do not fit in {d} columns")
    if spec.extra_dependent_rows < 0 or spec.noise_rows < 0:
        raise InfeasibleSpec("row counts must be non-negative")
    if not 0 <= spec.overlap_bias <= 1:
        raise InfeasibleSpec("overlap_bias must lie in [0, 1]")
    rng = np.random.default_rng(spec.seed)

    cols = rng.permutation(d)
    cuts = np.sort(rng.choice(np.arange(1, d), size=r - 1, replace=False)) if r > 1 else []
    planted = []
    for group in np.split(cols, cuts):
        planted.append(sum(1 << int(j) for j in group))

    dependent = []
    for _ in range(spec.extra_dependent_rows):
        take = rng.random(r) < spec.overlap_bias
        need = min(2, r)
        if take.sum() < need:
            extra = rng.choice(np.flatnonzero(~take), size=need - int(take.sum()), replace=False)
            take[extra] = True
        bits = 0
        for k in np.flatnonzero(take):
            bits ^= planted[k]
        dependent.append(bits)

    noise = []
    for _ in range(spec.noise_rows):
        bits = 0
        while bits == 0:
            bits = sum(1 << j for j in range(d) if rng.random() < 0.5)
        noise.append(bits)

    rows = planted + dependent + noise
    order = rng.permutation(len(rows))
    position = {int(src): pos for pos, src in enumerate(order)}
    M = VerdictMatrix(problem_id, tuple(Signature(rows[int(i)], d) for i in order),
                      tuple(f"w{k}" for k in range(len(rows))), d)
    return SynthResult(M, tuple(sorted(position[k] for k in range(r))))


_FAIL_VERDICTS = (Verdict.WA, Verdict.RE, Verdict.TLE)
_FAIL_WEIGHTS = (0.85, 0.08, 0.07)


def matrix_to_bundle(M: VerdictMatrix, rng: np.random.Generator, n_correct: int = 12) -> ProblemBundle:
    """Dress a matrix up as judge output: 1 becomes WA/RE/TLE, 0 becomes AC."""
    bundle = ProblemBundle(M.problem_id)
    for cid, sig in zip(M.row_ids, M.rows):
        verdicts = []
        for j in range(M.d):
            if sig[j]:
                verdicts.append(_FAIL_VERDICTS[rng.choice(3, p=_FAIL_WEIGHTS)])
            else:
                verdicts.append(Verdict.AC)
        bundle.wrong.append((cid, tuple(verdicts)))
    for k in range(n_correct):
        bundle.correct.append((f"c{k}", int(rng.integers(50, 2000))))
    return bundle


def synth_corpus(n_problems: int, seed: int = 0, planted_rank: int | None = None, d: int | None = None,
                 dependent: int | None = None, noise: int | None = None,
                 overlap_bias: float = 0.5) -> list[ProblemBundle]:
    """A corpus of synthetic problems; unspecified sizes are drawn per problem."""
    rng = np.random.default_rng(seed)
    bundles = []
    for p in range(n_problems):
        r = planted_rank if planted_rank is not None else int(rng.integers(4, 9))
        width = d if d is not None else int(rng.integers(r + 2, 2 * r + 8))
        spec = SynthSpec(
            planted_rank=r,
            d=width,
            extra_dependent_rows=dependent if dependent is not None else int(rng.integers(0, 12)),
            noise_rows=noise if noise is not None else int(rng.integers(0, 3)),
            overlap_bias=overlap_bias,
            seed=int(rng.integers(2**63)),
        )
        M = synth(spec, problem_id=f"p{p:04d}").matrix
        bundles.append(matrix_to_bundle(M, rng, n_correct=int(rng.integers(4, 30))))
    return bundles
