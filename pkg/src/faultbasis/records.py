"""Line-delimited JSON record files: verdict records in, AT-verdict records in, reports out."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from numbers import Real
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import DuplicateCodeId, MixedWidth, ParseError
from .judgemetrics import GeneratedTestResult
from .sigmatrix import Verdict


@dataclass
class ProblemBundle:
    problem_id: str
    wrong: list[tuple[str, tuple[Verdict, ...]]] = field(default_factory=list)
    correct: list[tuple[str, float]] = field(default_factory=list)

    @property
    def runtimes(self) -> dict[str, float]:
        return dict(self.correct)


def _objects(lines: Iterable[str]) -> Iterator[tuple[int, dict]]:
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(lineno, f"invalid JSON: {e.msg}") from None
        if not isinstance(obj, dict):
            raise ParseError(lineno, "record is not an object")
        yield lineno, obj


def _string(obj: dict, key: str, lineno: int) -> str:
    v = obj.get(key)
    if not isinstance(v, str) or not v:
        raise ParseError(lineno, f"field {key!r} must be a non-empty string")
    return v


def _verdict(token, lineno: int) -> Verdict:
    try:
        return Verdict.parse(token)
    except ValueError:
        raise ParseError(lineno, f"unknown verdict token {token!r}") from None


def parse_verdict_records(lines: Iterable[str]) -> list[ProblemBundle]:
    bundles: dict[str, ProblemBundle] = {}
    seen: dict[str, set[str]] = {}
    widths: dict[str, int] = {}
    for lineno, obj in _objects(lines):
        pid = _string(obj, "problem_id", lineno)
        cid = _string(obj, "code_id", lineno)
        label = obj.get("label")
        bundle = bundles.setdefault(pid, ProblemBundle(pid))
        ids = seen.setdefault(pid, set())
        if cid in ids:
            raise DuplicateCodeId(lineno, f"code id {cid!r} repeated in problem {pid!r}")
        ids.add(cid)
        if label == "wrong":
            raw = obj.get("verdicts")
            if not isinstance(raw, list):
                raise ParseError(lineno, "wrong code needs a 'verdicts' array")
            verdicts = tuple(_verdict(t, lineno) for t in raw)
            w = widths.setdefault(pid, len(verdicts))
            if len(verdicts) != w:
                raise MixedWidth(lineno, f"problem {pid!r}: {len(verdicts)} verdicts, earlier records had {w}")
            bundle.wrong.append((cid, verdicts))
        elif label == "correct":
            rt = obj.get("runtime_ms")
            if isinstance(rt, bool) or not isinstance(rt, Real) or rt < 0:
                raise ParseError(lineno, "correct code needs a non-negative numeric 'runtime_ms'")
            bundle.correct.append((cid, rt))
        else:
            raise ParseError(lineno, f"label must be 'wrong' or 'correct', got {label!r}")
    return list(bundles.values())


def ingest(path) -> list[ProblemBundle]:
    """Read a verdict-record file into per-problem bundles, in first-seen order."""
    with open(path, encoding="utf-8") as fh:
        return parse_verdict_records(fh)


def parse_at_records(lines: Iterable[str]) -> list[GeneratedTestResult]:
    out = []
    for lineno, obj in _objects(lines):
        pid = _string(obj, "problem_id", lineno)
        tid = obj.get("test_id")
        if not isinstance(tid, (str, int)) or isinstance(tid, bool):
            raise ParseError(lineno, "field 'test_id' must be a string or integer")
        cv = obj.get("correct_verdicts")
        wv = obj.get("wrong_verdicts")
        if not isinstance(cv, list):
            raise ParseError(lineno, "field 'correct_verdicts' must be an array")
        if not isinstance(wv, dict):
            raise ParseError(lineno, "field 'wrong_verdicts' must be an object")
        out.append(GeneratedTestResult(
            pid, str(tid),
            tuple(_verdict(t, lineno) for t in cv),
            {str(k): _verdict(v, lineno) for k, v in wv.items()},
        ))
    return out


def read_at_records(path) -> list[GeneratedTestResult]:
    with open(path, encoding="utf-8") as fh:
        return parse_at_records(fh)


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_records(records: Iterable[dict], fh: IO[str]) -> None:
    for r in records:
        fh.write(dumps(r) + "\n")


def bundle_records(bundles: Iterable[ProblemBundle]) -> Iterator[dict]:
    for b in bundles:
        for cid, verdicts in b.wrong:
            yield {"problem_id": b.problem_id, "code_id": cid, "label": "wrong",
                   "verdicts": [v.value for v in verdicts]}
        for cid, rt in b.correct:
            yield {"problem_id": b.problem_id, "code_id": cid, "label": "correct", "runtime_ms": rt}


def looks_like_records(path) -> bool:
    """True when the first non-blank character of the file is ``{``."""
    with open(Path(path), encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s:
                return s.startswith("{")
    return False
