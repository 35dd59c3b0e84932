"""PassRate / HackRate evaluation of generated tests against a wrong-code basis.

A generated test is *valid* when every sampled correct code accepts it.  A
basis code is *excluded* when some valid test gives it a non-AC verdict; the
exclusion is attributed to one verdict category by fixed precedence.  Both
rates are averaged per problem first and then over problems (macro).

All fractions are exact :class:`~fractions.Fraction` values; rounding happens
only when rendering percentages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NoCorrectCodes, UnknownCode
from .prefilter import exact_fraction
from .sigmatrix import Verdict

PRECEDENCE = (Verdict.WA, Verdict.RE, Verdict.TLE, Verdict.MLE, Verdict.CE, Verdict.OTHER)
BUCKETS = ("ac", "wa", "re", "tle", "other")
_BUCKET_OF = {Verdict.WA: "wa", Verdict.RE: "re", Verdict.TLE: "tle",
              Verdict.MLE: "other", Verdict.CE: "other", Verdict.OTHER: "other"}


@dataclass(frozen=True)
class GeneratedTestResult:
    problem_id: str
    test_id: str
    correct_verdicts: tuple[Verdict, ...]
    wrong_verdicts: Mapping[str, Verdict]

    def __post_init__(self):
        object.__setattr__(self, "correct_verdicts", tuple(Verdict.parse(v) for v in self.correct_verdicts))
        object.__setattr__(self, "wrong_verdicts",
                           {k: Verdict.parse(v) for k, v in self.wrong_verdicts.items()})


def is_valid(t: GeneratedTestResult) -> bool:
    if not t.correct_verdicts:
        raise NoCorrectCodes(f"test {t.problem_id}/{t.test_id} has no correct-code verdicts")
    return all(v is Verdict.AC for v in t.correct_verdicts)


def is_excluded(code_id: str, valid_tests: Iterable[GeneratedTestResult]) -> Verdict | None:
    """Attributed failing verdict of ``code_id`` over valid tests, or ``None`` if it survives."""
    worst = None
    for t in valid_tests:
        try:
            v = t.wrong_verdicts[code_id]
        except KeyError:
            raise UnknownCode(f"code {code_id} missing from test {t.problem_id}/{t.test_id}") from None
        if v is Verdict.AC:
            continue
        if worst is None or PRECEDENCE.index(v) < PRECEDENCE.index(worst):
            worst = v
    return worst


def _mean(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0)) / len(values) if values else Fraction(0)


def pass_rate(problems: Iterable[tuple[str, Sequence[GeneratedTestResult]]]):
    """Returns ``(per_problem, macro)``; a problem with no generated tests scores 0."""
    per = {}
    for pid, tests in problems:
        per[pid] = Fraction(sum(is_valid(t) for t in tests), len(tests)) if tests else Fraction(0)
    return per, _mean(list(per.values()))


@dataclass
class ProblemMetrics:
    problem_id: str
    n_tests: int
    n_valid: int
    n_codes: int
    pass_rate: Fraction
    hack_rate: Fraction
    breakdown: dict[str, Fraction]
    excluded: dict[str, str] = field(default_factory=dict)


def percent(x: Fraction) -> float:
    """Percentage rounded half-up to 2 decimals, computed from the exact value."""
    x = Fraction(x) * 100
    d = Decimal(x.numerator) / Decimal(x.denominator)
    return float(d.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _fractions_record(values: Mapping[str, Fraction]) -> dict:
    return {k: float(v) for k, v in values.items()}


@dataclass
class MetricsReport:
    problems: list[ProblemMetrics]
    pass_rate: Fraction
    hack_rate: Fraction
    breakdown: dict[str, Fraction]

    def to_records(self) -> list[dict]:
        out = []
        for p in self.problems:
            out.append({
                "kind": "problem",
                "problem_id": p.problem_id,
                "n_tests": p.n_tests,
                "n_valid": p.n_valid,
                "n_codes": p.n_codes,
                "pass_rate": float(p.pass_rate),
                "hack_rate": float(p.hack_rate),
                "breakdown": _fractions_record(p.breakdown),
                "excluded": dict(p.excluded),
                "display": self._display(p.pass_rate, p.hack_rate, p.breakdown),
            })
        out.append({
            "kind": "macro",
            "n_problems": len(self.problems),
            "pass_rate": float(self.pass_rate),
            "hack_rate": float(self.hack_rate),
            "breakdown": _fractions_record(self.breakdown),
            "display": self._display(self.pass_rate, self.hack_rate, self.breakdown),
        })
        return out

    @staticmethod
    def _display(pr, hr, breakdown) -> dict:
        d = {"PR": percent(pr), "HR": percent(hr)}
        d.update({k.upper(): percent(v) for k, v in breakdown.items()})
        return d

    def to_text(self) -> str:
        head = f"{'problem':<20} {'PR':>7} {'AC':>7} {'WA':>7} {'RE':>7} {'TLE':>7} {'OTHER':>7} {'HR':>7}"
        lines = [head]

        def row(name, pr, hr, b):
            cells = [percent(pr), percent(b["ac"]), percent(b["wa"]), percent(b["re"]),
                     percent(b["tle"]), percent(b["other"]), percent(hr)]
            return f"{name:<20} " + " ".join(f"{c:7.2f}" for c in cells)

        for p in self.problems:
            lines.append(row(p.problem_id, p.pass_rate, p.hack_rate, p.breakdown))
        lines.append(row("MACRO", self.pass_rate, self.hack_rate, self.breakdown))
        return "\n".join(lines) + "\n"


def problem_metrics(problem_id: str, basis_ids: Sequence[str],
                    tests: Sequence[GeneratedTestResult]) -> ProblemMetrics:
    if not basis_ids:
        raise ValueError(f"problem {problem_id}: empty wrong-code basis")
    valid = [t for t in tests if is_valid(t)]
    counts = dict.fromkeys(BUCKETS, 0)
    excluded = {}
    for cid in basis_ids:
        v = is_excluded(cid, valid)
        if v is None:
            counts["ac"] += 1
        else:
            counts[_BUCKET_OF[v]] += 1
            excluded[cid] = v.value
    n = len(basis_ids)
    breakdown = {k: Fraction(c, n) for k, c in counts.items()}
    return ProblemMetrics(
        problem_id=problem_id,
        n_tests=len(tests),
        n_valid=len(valid),
        n_codes=n,
        pass_rate=Fraction(len(valid), len(tests)) if tests else Fraction(0),
        hack_rate=Fraction(n - counts["ac"], n),
        breakdown=breakdown,
        excluded=excluded,
    )


def hack_rate(problems: Iterable[tuple[str, Sequence[str], Sequence[GeneratedTestResult]]]) -> MetricsReport:
    per = [problem_metrics(pid, basis, tests) for pid, basis, tests in problems]
    return MetricsReport(
        problems=per,
        pass_rate=_mean([p.pass_rate for p in per]),
        hack_rate=_mean([p.hack_rate for p in per]),
        breakdown={k: _mean([p.breakdown[k] for p in per]) for k in BUCKETS},
    )


def select_correct_codes(runtimes: Mapping[str, float], quantile=0.2, k: int = 8,
                         rng: np.random.Generator | None = None) -> list[str]:
    """Sample up to ``k`` of the fastest correct codes.

    Runtimes are min-max normalised to [0, 1] (all zeros when every runtime is
    equal) and codes at or below ``quantile`` are eligible.
    """
    if not runtimes:
        raise ValueError("no correct-code runtimes given")
    if any(r < 0 for r in runtimes.values()):
        raise ValueError("runtimes must be non-negative")
    q = exact_fraction(quantile)
    ids = list(runtimes)
    exact = [exact_fraction(runtimes[i]) for i in ids]
    lo, hi = min(exact), max(exact)
    if hi == lo:
        eligible = ids
    else:
        eligible = [i for i, r in zip(ids, exact) if (r - lo) / (hi - lo) <= q]
    if rng is None:
        rng = np.random.default_rng(0)
    picks = rng.choice(len(eligible), size=min(k, len(eligible)), replace=False)
    return [eligible[int(p)] for p in picks]
