"""Problem-, code- and quality-level filtering of a raw verdict matrix.

The steps run in a fixed order:

1. reject the problem if any column is all ones (every wrong code fails that test);
2. drop rows whose failure rate is strictly above ``tau``;
3. merge identical rows, remembering how many copies each kept row had;
4. reject if fewer than ``min_rank`` rows remain, or if the rank is below ``min_rank``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .sigmatrix import Signature, VerdictMatrix, rank


class Outcome(str, enum.Enum):
    ACCEPTED = "Accepted"
    REJECTED_ALL_ONES_COLUMN = "RejectedAllOnesColumn"
    REJECTED_LOW_RANK = "RejectedLowRank"
    REJECTED_TOO_FEW_ROWS = "RejectedTooFewRows"
    FAILED = "Failed"


def exact_fraction(x) -> Fraction:
    """``0.8 -> 4/5``: floats go through their shortest repr, not their binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class FilterConfig:
    tau: Fraction = Fraction(4, 5)
    min_rank: int = 5

    def __post_init__(self):
        object.__setattr__(self, "tau", exact_fraction(self.tau))
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.min_rank < 1:
            raise ValueError(f"min_rank must be >= 1, got {self.min_rank}")


@dataclass
class FilterReport:
    problem_id: str
    outcome: Outcome
    n_in: int
    all_ones_columns: list[int] = field(default_factory=list)
    dropped_rows: list[tuple[str, Fraction]] = field(default_factory=list)
    dedup_groups: dict[str, list[str]] = field(default_factory=dict)
    kept_ids: list[str] = field(default_factory=list)
    rank_before: int = 0
    rank_after: int = 0
    # all-ones columns that only appear after row filtering; reported, never rejected on
    post_filter_all_ones_columns: list[int] = field(default_factory=list)

    @property
    def n_dropped(self) -> int:
        return len(self.dropped_rows)

    @property
    def n_deduped(self) -> int:
        return sum(len(v) for v in self.dedup_groups.values())

    def to_record(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "outcome": self.outcome.value,
            "n_in": self.n_in,
            "all_ones_columns": list(self.all_ones_columns),
            "dropped_rows": [[cid, float(rate)] for cid, rate in self.dropped_rows],
            "dedup_groups": {k: list(v) for k, v in self.dedup_groups.items()},
            "kept_ids": list(self.kept_ids),
            "rank_before": self.rank_before,
            "rank_after": self.rank_after,
            "post_filter_all_ones_columns": list(self.post_filter_all_ones_columns),
        }


def all_ones_columns(M: VerdictMatrix) -> list[int]:
    if M.n == 0:
        raise ValueError("all_ones_columns needs at least one row")
    acc = (1 << M.d) - 1
    for r in M.rows:
        acc &= r.bits
    return [j for j in range(M.d) if acc >> j & 1]


def row_failure_rate(r: Signature) -> Fraction:
    return Fraction(r.popcount, r.width)


def filter_rows(M: VerdictMatrix, tau) -> tuple[VerdictMatrix, list[tuple[str, Fraction]]]:
    """Drop rows failing strictly more than ``tau`` of the tests."""
    tau = exact_fraction(tau)
    keep, dropped = [], []
    for i, r in enumerate(M.rows):
        rate = row_failure_rate(r)
        if rate > tau:
            dropped.append((M.row_ids[i], rate))
        else:
            keep.append(i)
    return M.take(keep), dropped


def deduplicate(M: VerdictMatrix) -> tuple[VerdictMatrix, dict[str, list[str]]]:
    """Keep the first copy of each distinct row; map kept id to the ids merged into it."""
    first: dict[int, int] = {}
    groups: dict[str, list[str]] = {}
    keep = []
    for i, r in enumerate(M.rows):
        j = first.get(r.bits)
        if j is None:
            first[r.bits] = i
            keep.append(i)
        else:
            groups.setdefault(M.row_ids[j], []).append(M.row_ids[i])
    return M.take(keep), groups


def prefilter_problem(M: VerdictMatrix, cfg: FilterConfig = FilterConfig()):
    """Returns ``(M', report)``; ``M'`` is ``None`` unless the problem is accepted."""
    report = FilterReport(M.problem_id, Outcome.ACCEPTED, n_in=M.n, rank_before=rank(M))
    report.all_ones_columns = all_ones_columns(M) if M.n else []
    if report.all_ones_columns:
        report.outcome = Outcome.REJECTED_ALL_ONES_COLUMN
        report.rank_after = report.rank_before
        return None, report

    filtered, report.dropped_rows = filter_rows(M, cfg.tau)
    reduced, report.dedup_groups = deduplicate(filtered)
    report.kept_ids = list(reduced.row_ids)
    report.rank_after = rank(reduced)
    if reduced.n:
        report.post_filter_all_ones_columns = all_ones_columns(reduced)

    if reduced.n < cfg.min_rank:
        report.outcome = Outcome.REJECTED_TOO_FEW_ROWS
        return None, report
    if report.rank_after < cfg.min_rank:
        report.outcome = Outcome.REJECTED_LOW_RANK
        return None, report
    return reduced, report
