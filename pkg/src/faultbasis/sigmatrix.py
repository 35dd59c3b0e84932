"""Failure signatures, the binary code-test matrix, and GF(2) algebra over it.

A signature is stored as a Python ``int`` whose bit ``j`` is set when the code
failed golden test ``j``.  Text renderings list columns left to right, so the
string ``"011"`` means test 0 passed and tests 1 and 2 failed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import AllPassRow, BothEmpty, EmptyTests, ParseError, WidthMismatch


class Verdict(str, enum.Enum):
    AC = "AC"
    WA = "WA"
    RE = "RE"
    TLE = "TLE"
    MLE = "MLE"
    CE = "CE"
    OTHER = "OTHER"

    @property
    def failing(self) -> bool:
        return self is not Verdict.AC

    @classmethod
    def parse(cls, token) -> "Verdict":
        if isinstance(token, Verdict):
            return token
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown verdict {token!r}") from None


@dataclass(frozen=True)
class Signature:
    bits: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise EmptyTests("signature width must be >= 1")
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(f"bits {self.bits:#x} do not fit in width {self.width}")

    @classmethod
    def from_string(cls, s: str) -> "Signature":
        bits = 0
        for j, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << j
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(bits, len(s))

    @classmethod
    def from_bools(cls, values: Iterable) -> "Signature":
        bits = 0
        width = 0
        for j, v in enumerate(values):
            if v:
                bits |= 1 << j
            width = j + 1
        return cls(bits, width)

    @property
    def popcount(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return "".join("1" if self.bits >> j & 1 else "0" for j in range(self.width))

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.width:
            raise IndexError(j)
        return self.bits >> j & 1

    def restrict(self, columns: Sequence[int]) -> "Signature":
        bits = 0
        for k, j in enumerate(columns):
            if self.bits >> j & 1:
                bits |= 1 << k
        return Signature(bits, len(columns))


@dataclass(frozen=True)
class VerdictMatrix:
    problem_id: str
    rows: tuple[Signature, ...]
    row_ids: tuple[str, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "row_ids", tuple(self.row_ids))
        if self.d < 1:
            raise EmptyTests(f"problem {self.problem_id}: no golden tests")
        if len(self.rows) != len(self.row_ids):
            raise ValueError("rows and row_ids differ in length")
        if len(set(self.row_ids)) != len(self.row_ids):
            raise ValueError(f"problem {self.problem_id}: duplicate code ids")
        for r in self.rows:
            if r.width != self.d:
                raise WidthMismatch(f"row width {r.width} != matrix width {self.d}")

    @classmethod
    def from_strings(cls, rows: Sequence[str], problem_id: str = "p", row_ids=None) -> "VerdictMatrix":
        """Convenience constructor, mostly for tests: ``from_strings(["001", "011"])``."""
        sigs = [Signature.from_string(s) for s in rows]
        if row_ids is None:
            row_ids = [f"w{i}" for i in range(len(sigs))]
        d = sigs[0].width if sigs else 0
        return cls(problem_id, tuple(sigs), tuple(row_ids), d)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def take(self, indices: Iterable[int]) -> "VerdictMatrix":
        idx = list(indices)
        return VerdictMatrix(self.problem_id, tuple(self.rows[i] for i in idx),
                             tuple(self.row_ids[i] for i in idx), self.d)

    def restrict_columns(self, columns: Sequence[int]) -> "VerdictMatrix":
        return VerdictMatrix(self.problem_id, tuple(r.restrict(columns) for r in self.rows),
                             self.row_ids, len(columns))

    @cached_property
    def packed(self) -> np.ndarray:
        """Rows as a C-contiguous ``(n, ceil(d/64))`` uint64 array, bit j of word j//64."""
        words = (self.d + 63) // 64
        out = np.zeros((self.n, words), dtype=np.uint64)
        mask = (1 << 64) - 1
        for i, r in enumerate(self.rows):
            b = r.bits
            for w in range(words):
                out[i, w] = (b >> (64 * w)) & mask
        return out

    @cached_property
    def popcounts(self) -> np.ndarray:
        return np.array([r.popcount for r in self.rows], dtype=np.int64)

    def to_text(self) -> str:
        lines = [f"{self.problem_id} {self.n} {self.d}"]
        lines += [f"{cid} {sig}" for cid, sig in zip(self.row_ids, self.rows)]
        return "\n".join(lines) + "\n"


def build_matrix(problem_id: str, records: Sequence[tuple[str, Sequence]]) -> VerdictMatrix:
    """Turn ``(code_id, verdicts)`` records into a matrix; any non-AC verdict is a 1."""
    widths = {len(v) for _, v in records}
    if len(widths) > 1:
        raise WidthMismatch(f"problem {problem_id}: verdict lists of widths {sorted(widths)}")
    d = widths.pop() if widths else 0
    if d == 0:
        raise EmptyTests(f"problem {problem_id}: no golden tests")
    rows = []
    for code_id, verdicts in records:
        sig = Signature.from_bools(Verdict.parse(v).failing for v in verdicts)
        if sig.bits == 0:
            raise AllPassRow(f"problem {problem_id}: code {code_id} passes every golden test")
        rows.append(sig)
    return VerdictMatrix(problem_id, tuple(rows), tuple(cid for cid, _ in records), d)


# ---------------------------------------------------------------------------
# GF(2) elimination on int bitsets


def _reduce(v: int, pivots: dict[int, int]) -> int:
    while v:
        top = v.bit_length() - 1
        p = pivots.get(top)
        if p is None:
            return v
        v ^= p
    return 0


def _insert(v: int, pivots: dict[int, int]) -> bool:
    v = _reduce(v, pivots)
    if v:
        pivots[v.bit_length() - 1] = v
        return True
    return False


def _check_widths(rows: Sequence[Signature], width: int | None = None):
    for r in rows:
        if width is None:
            width = r.width
        elif r.width != width:
            raise WidthMismatch(f"width {r.width} != {width}")


def rank_of(rows: Iterable[Signature]) -> int:
    pivots: dict[int, int] = {}
    for r in rows:
        _insert(r.bits, pivots)
    return len(pivots)


def rank(M: VerdictMatrix) -> int:
    """GF(2) row rank of ``M``."""
    return rank_of(M.rows)


def is_independent(rows: Sequence[Signature]) -> bool:
    return rank_of(rows) == len(rows)


def in_span(r: Signature, rows: Sequence[Signature]) -> bool:
    """True iff ``r`` is an XOR of some subset of ``rows`` (the empty XOR is 0)."""
    _check_widths(rows, r.width)
    pivots: dict[int, int] = {}
    for row in rows:
        _insert(row.bits, pivots)
    return _reduce(r.bits, pivots) == 0


def column_basis(M: VerdictMatrix) -> list[int]:
    """Leftmost-pivot column basis: column j is kept iff independent of kept columns to its left."""
    cols = [0] * M.d
    for i, r in enumerate(M.rows):
        b = r.bits
        while b:
            low = b & -b
            cols[low.bit_length() - 1] |= 1 << i
            b ^= low
    pivots: dict[int, int] = {}
    return [j for j, c in enumerate(cols) if _insert(c, pivots)]


# ---------------------------------------------------------------------------
# diversity objective


def jaccard(a: Signature, b: Signature) -> Fraction:
    if a.width != b.width:
        raise WidthMismatch(f"width {a.width} != {b.width}")
    inter = (a.bits & b.bits).bit_count()
    union = a.popcount + b.popcount - inter
    if union == 0:
        raise BothEmpty("jaccard of two all-zero signatures")
    return Fraction(inter, union)


def avg_diversity(rows: Sequence[Signature]) -> Fraction:
    """Mean pairwise Jaccard similarity; 0 for fewer than two rows."""
    rows = list(rows)
    if len(rows) < 2:
        _check_widths(rows)
        return Fraction(0)
    total = sum((jaccard(a, b) for a, b in combinations(rows, 2)), Fraction(0))
    return total / (len(rows) * (len(rows) - 1) // 2)


# ---------------------------------------------------------------------------
# matrix text format


def parse_matrices(text: str) -> list[VerdictMatrix]:
    """Parse one or more concatenated matrix blocks.

    Each block is a ``<problem_id> <n> <d>`` header followed by ``n`` lines of
    ``<code_id> <bits>``.  Anything other than ``0``/``1`` in a bit field is a
    :class:`ParseError`.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for k, line in enumerate(lines):
        if not line.isascii():
            raise ParseError(k + 1, "non-ASCII content")
    out = []
    i = 0
    while i < len(lines):
        lineno = i + 1
        head = lines[i].split(" ")
        if len(head) != 3:
            raise ParseError(lineno, f"expected '<problem_id> <n> <d>', got {lines[i]!r}")
        pid, n_s, d_s = head
        if not (n_s.isdigit() and d_s.isdigit()) or not n_s.isascii() or not d_s.isascii():
            raise ParseError(lineno, f"bad matrix dimensions {n_s!r} {d_s!r}")
        n, d = int(n_s), int(d_s)
        if d < 1:
            raise ParseError(lineno, "matrix must have at least one column")
        if n > len(lines) - i - 1:
            raise ParseError(lineno, f"header promises {n} rows, file ends early")
        rows, ids = [], []
        for k in range(1, n + 1):
            parts = lines[i + k].split(" ")
            if len(parts) != 2 or not parts[0]:
                raise ParseError(lineno + k, f"expected '<code_id> <bits>', got {lines[i + k]!r}")
            cid, bits = parts
            if len(bits) != d:
                raise ParseError(lineno + k, f"row has {len(bits)} bits, expected {d}")
            bad = set(bits) - {"0", "1"}
            if bad:
                raise ParseError(lineno + k, f"invalid character {sorted(bad)[0]!r} in bit field")
            rows.append(Signature.from_string(bits))
            ids.append(cid)
        if len(set(ids)) != len(ids):
            raise ParseError(lineno, f"duplicate code id in problem {pid}")
        out.append(VerdictMatrix(pid, tuple(rows), tuple(ids), d))
        i += n + 1
    return out


def format_matrices(matrices: Iterable[VerdictMatrix]) -> str:
    return "".join(M.to_text() for M in matrices)
