"""Random-restart swap local search for a maximally diverse row basis.

The search minimises the average pairwise Jaccard similarity F over all row
bases of a filtered matrix.  A neighbour of a basis swaps one member for one
outside row while keeping full rank.  Each restart starts from a shuffled
greedy basis and moves to the best neighbour until none improves.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import kernels
from .errors import InvariantViolation, TooLarge
from .sigmatrix import VerdictMatrix, avg_diversity, in_span, is_independent, jaccard, rank

log = logging.getLogger(__name__)

ENUMERATION_CAP = 2_000_000


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 1000
    max_steps: int = 1000
    seed: int = 0
    early_stop_on_zero: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class RestartRecord:
    initial_f: float
    final_f: float
    steps: int
    terminated_by: str
    f_history: tuple[float, ...]
    indices: tuple[int, ...]


@dataclass
class SearchTrace:
    restarts: list[RestartRecord] = field(default_factory=list)

    def steps(self) -> list[int]:
        return [r.steps for r in self.restarts]


@dataclass(frozen=True)
class BasisSelection:
    indices: tuple[int, ...]
    rank: int
    diversity: Fraction
    restarts_used: int
    steps_per_restart: tuple[int, ...]
    seed: int
    best_restart: int = 0

    def rows(self, M: VerdictMatrix):
        return [M.rows[i] for i in self.indices]

    def code_ids(self, M: VerdictMatrix) -> list[str]:
        return [M.row_ids[i] for i in self.indices]


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Independent generator for one restart, derived from the master seed."""
    return np.random.default_rng([seed % 2**64, restart])


def random_basis(M: VerdictMatrix, rng: np.random.Generator, backend: str | None = None) -> tuple[int, ...]:
    """Shuffle the rows and keep each one that raises the rank, until full rank."""
    order = rng.permutation(M.n).astype(np.int64)
    basis = kernels.get_backend(backend).greedy_basis(M.packed, order, rank(M))
    return tuple(int(i) for i in basis)


def best_neighbor(I: Sequence[int], M: VerdictMatrix, F_current: Fraction):
    """Exact best-improvement neighbour of basis ``I``, or ``None`` at a local optimum.

    Ties go to the lexicographically smallest ``(out, in)`` pair of row indices.
    """
    current = sorted(I)
    members = set(current)
    best = None
    best_f = Fraction(F_current)
    for r_out in current:
        kept = [i for i in current if i != r_out]
        kept_rows = [M.rows[i] for i in kept]
        for r_in in range(M.n):
            if r_in in members or in_span(M.rows[r_in], kept_rows):
                continue
            f = avg_diversity(kept_rows + [M.rows[r_in]])
            if f < best_f:
                best_f = f
                best = tuple(sorted(kept + [r_in]))
    if best is None:
        return None
    return best, best_f


def _descend(kern, M: VerdictMatrix, start: np.ndarray, max_steps: int, early_stop: bool) -> RestartRecord:
    cur, hist, steps, term = kern.local_search(M.packed, M.popcounts, start, max_steps, early_stop,
                                               kernels.EPS)
    return RestartRecord(
        initial_f=float(hist[0]),
        final_f=float(hist[-1]),
        steps=int(steps),
        terminated_by=kernels.TERMINATION_NAMES[int(term)],
        f_history=tuple(float(x) for x in hist),
        indices=tuple(int(i) for i in cur),
    )


def local_search(I0: Sequence[int], M: VerdictMatrix, K: int, early_stop: bool = True,
                 backend: str | None = None):
    """Run at most ``K`` best-neighbour moves from ``I0``; returns ``(indices, F, steps)``."""
    start = np.sort(np.asarray(list(I0), dtype=np.int64))
    rec = _descend(kernels.get_backend(backend), M, start, K, early_stop)
    return rec.indices, avg_diversity([M.rows[i] for i in rec.indices]), rec.steps


def wrong_select(M: VerdictMatrix, cfg: SearchConfig, workers: int = 1, backend: str | None = None):
    """Random-restart local search; returns ``(BasisSelection, SearchTrace)``.

    Restart ``i`` draws its initial basis from :func:`restart_rng` ``(cfg.seed, i)``,
    so the result does not depend on ``workers``.  With early stopping on, the
    run ends after the first restart that reaches F = 0.
    """
    R = rank(M)
    if R == 0:
        raise ValueError(f"problem {M.problem_id}: matrix has rank 0")
    kern = kernels.get_backend(backend)

    def run(i: int) -> RestartRecord:
        order = restart_rng(cfg.seed, i).permutation(M.n).astype(np.int64)
        start = kern.greedy_basis(M.packed, order, R)
        return _descend(kern, M, start, cfg.max_steps, cfg.early_stop_on_zero)

    def is_zero(rec: RestartRecord) -> bool:
        return cfg.early_stop_on_zero and rec.terminated_by == "zero-diversity"

    records: list[RestartRecord] = []
    if workers <= 1:
        for i in range(cfg.restarts):
            records.append(run(i))
            if is_zero(records[-1]):
                break
    else:
        chunk = 4 * workers
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for lo in range(0, cfg.restarts, chunk):
                batch = list(pool.map(run, range(lo, min(lo + chunk, cfg.restarts))))
                hit = next((k for k, rec in enumerate(batch) if is_zero(rec)), None)
                if hit is not None:
                    records.extend(batch[:hit + 1])
                    break
                records.extend(batch)

    best_i = 0
    for i, rec in enumerate(records):
        if rec.final_f < records[best_i].final_f - kernels.EPS:
            best_i = i
    chosen = records[best_i].indices
    rows = [M.rows[i] for i in chosen]
    if len(chosen) != R or not is_independent(rows):
        raise InvariantViolation(f"problem {M.problem_id}: search returned a non-basis {chosen}")
    log.debug("problem %s: best F=%.6f at restart %d of %d", M.problem_id,
              records[best_i].final_f, best_i, len(records))
    selection = BasisSelection(
        indices=chosen,
        rank=R,
        diversity=avg_diversity(rows),
        restarts_used=len(records),
        steps_per_restart=tuple(r.steps for r in records),
        seed=cfg.seed,
        best_restart=best_i,
    )
    return selection, SearchTrace(records)


def brute_force_best_basis(M: VerdictMatrix, cap: int = ENUMERATION_CAP):
    """Global optimum by enumerating every rank-sized row subset (small instances only)."""
    R = rank(M)
    total = comb(M.n, R)
    if total > cap:
        raise TooLarge(f"C({M.n}, {R}) = {total} subsets exceeds cap {cap}")
    J = {}
    for a, b in combinations(range(M.n), 2):
        J[a, b] = jaccard(M.rows[a], M.rows[b])
    npairs = R * (R - 1) // 2
    best, best_f = None, None
    for subset in combinations(range(M.n), R):
        if not is_independent([M.rows[i] for i in subset]):
            continue
        s = sum((J[p] for p in combinations(subset, 2)), Fraction(0))
        f = s / npairs if npairs else Fraction(0)
        if best_f is None or f < best_f:
            best, best_f = subset, f
    return best, best_f
