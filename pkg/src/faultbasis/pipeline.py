"""Per-problem orchestration: matrix -> prefilter -> basis search -> test reduction -> correct codes."""

from __future__ import annotations

import hashlib
import logging
import statistics
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import FaultBasisError, InvariantViolation
from .judgemetrics import select_correct_codes
from .prefilter import FilterConfig, Outcome, prefilter_problem
from .records import ProblemBundle
from .sigmatrix import VerdictMatrix, build_matrix, column_basis, rank_of
from .wrongselect import BasisSelection, SearchConfig, wrong_select

log = logging.getLogger(__name__)


def derive_seed(master: int, problem_id: str, purpose: str) -> int:
    digest = hashlib.blake2b(f"{master}\x00{problem_id}\x00{purpose}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def reduce_tests(M: VerdictMatrix, selection: BasisSelection) -> list[int]:
    """Columns of ``M`` that already separate the basis rows: a column basis of the basis submatrix."""
    return column_basis(M.take(selection.indices))


def check_reduction(M: VerdictMatrix, selection: BasisSelection, columns: Sequence[int]) -> None:
    sub = [M.rows[i].restrict(columns) for i in selection.indices]
    if len(columns) > selection.rank:
        raise InvariantViolation(f"{M.problem_id}: {len(columns)} test columns for rank {selection.rank}")
    if rank_of(sub) != selection.rank or len({s.bits for s in sub}) != len(sub):
        raise InvariantViolation(f"{M.problem_id}: reduced tests lose basis rank or distinctness")


def selection_record(M: VerdictMatrix, sel: BasisSelection, trace) -> dict:
    terminations = Counter(r.terminated_by for r in trace.restarts)
    return {
        "indices": list(sel.indices),
        "code_ids": sel.code_ids(M),
        "rank": sel.rank,
        "diversity": float(sel.diversity),
        "diversity_exact": f"{sel.diversity.numerator}/{sel.diversity.denominator}",
        "restarts_used": sel.restarts_used,
        "best_restart": sel.best_restart,
        "seed": sel.seed,
        "steps_per_restart": list(sel.steps_per_restart),
        "median_steps": statistics.median(sel.steps_per_restart),
        "terminations": dict(sorted(terminations.items())),
    }


@dataclass
class PipelineConfig:
    filter: FilterConfig = FilterConfig()
    search: SearchConfig = SearchConfig()
    quantile: float = 0.2
    correct_k: int = 8


def run_problem(bundle: ProblemBundle, cfg: PipelineConfig) -> dict:
    pid = bundle.problem_id
    rec = {"kind": "problem", "problem_id": pid, "n_wrong": len(bundle.wrong),
           "n_correct": len(bundle.correct)}
    try:
        M = build_matrix(pid, bundle.wrong)
        Mp, report = prefilter_problem(M, cfg.filter)
        rec["outcome"] = report.outcome.value
        rec["filter"] = report.to_record()
        if Mp is None:
            return rec
        search = replace(cfg.search, seed=derive_seed(cfg.search.seed, pid, "search"))
        sel, trace = wrong_select(Mp, search)
        rec["selection"] = selection_record(Mp, sel, trace)
        cols = reduce_tests(Mp, sel)
        check_reduction(Mp, sel, cols)
        rec["test_columns"] = cols
        if bundle.correct:
            rng = np.random.default_rng(derive_seed(cfg.search.seed, pid, "correct"))
            rec["correct_codes"] = select_correct_codes(bundle.runtimes, cfg.quantile, cfg.correct_k, rng)
        else:
            rec["correct_codes"] = []
        return rec
    except InvariantViolation:
        raise
    except (FaultBasisError, ValueError) as e:
        log.warning("problem %s failed: %s", pid, e)
        return {**rec, "outcome": Outcome.FAILED.value, "reason": f"{type(e).__name__}: {e}"}


def totals(records: Sequence[dict]) -> dict:
    outcomes = Counter(r["outcome"] for r in records)
    codes = Counter()
    for r in records:
        codes["in"] += r["n_wrong"]
        f = r.get("filter")
        if f is None or r["outcome"] == Outcome.REJECTED_ALL_ONES_COLUMN.value:
            codes["unprocessed"] += r["n_wrong"]
            continue
        codes["kept"] += len(f["kept_ids"])
        codes["dropped"] += len(f["dropped_rows"])
        codes["deduped"] += sum(len(v) for v in f["dedup_groups"].values())
        if r["outcome"] == Outcome.ACCEPTED.value:
            codes["selected"] += r["selection"]["rank"]
    out = {
        "kind": "totals",
        "problems_in": len(records),
        "problems_accepted": outcomes.get(Outcome.ACCEPTED.value, 0),
        "problems_failed": outcomes.get(Outcome.FAILED.value, 0),
        "problems_rejected": {o.value: outcomes.get(o.value, 0) for o in Outcome
                              if o.value.startswith("Rejected")},
        "codes_in": codes["in"],
        "codes_kept": codes["kept"],
        "codes_dropped": codes["dropped"],
        "codes_deduped": codes["deduped"],
        "codes_unprocessed": codes["unprocessed"],
        "codes_selected": codes["selected"],
    }
    if out["codes_in"] != out["codes_kept"] + out["codes_dropped"] + out["codes_deduped"] + out["codes_unprocessed"]:
        raise InvariantViolation("code counts do not add up across the corpus")
    return out


@dataclass
class PipelineReport:
    problems: list[dict]
    totals: dict

    def to_records(self) -> list[dict]:
        return [*self.problems, self.totals]


def run_pipeline(bundles: Sequence[ProblemBundle], cfg: PipelineConfig = PipelineConfig(),
                 workers: int = 1) -> PipelineReport:
    """Process every problem; the report does not depend on ``workers``."""
    if workers <= 1:
        records = [run_problem(b, cfg) for b in bundles]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda b: run_problem(b, cfg), bundles))
    return PipelineReport(records, totals(records))
