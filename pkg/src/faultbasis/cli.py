"""Command-line entry point: ``faultbasis <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from dataclasses import replace

from . import records as rio
from .errors import FaultBasisError, InvariantViolation, ParseError
from .judgemetrics import hack_rate, percent
from .pipeline import PipelineConfig, derive_seed, reduce_tests, run_pipeline, selection_record, check_reduction
from .prefilter import FilterConfig, Outcome, prefilter_problem
from .sigmatrix import build_matrix, format_matrices, parse_matrices
from .synth import SynthSpec, synth, synth_corpus
from .wrongselect import SearchConfig, wrong_select

log = logging.getLogger("faultbasis")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, *, needs_in=True):
    if needs_in:
        p.add_argument("--in", dest="inp", required=True, help="input file")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--format", choices=("text", "records"), default="records")
    p.add_argument("--seed", type=int, default=None, help="master seed (falls back to $FAULTBASIS_SEED, then 0)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")


def _filter_flags(p):
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--min-rank", type=int, default=5)


def _search_flags(p):
    p.add_argument("--restarts", type=int, default=1000)
    p.add_argument("--steps", type=int, default=1000)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="faultbasis", description="Diverse wrong-code bases from verdict matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("filter", help="pre-filter problems")
    _common(p)
    _filter_flags(p)

    p = sub.add_parser("select", help="filter, then search for the most diverse basis")
    _common(p)
    _filter_flags(p)
    _search_flags(p)

    p = sub.add_parser("reduce-tests", help="filter, select, and pick a test subset separating the basis")
    _common(p)
    _filter_flags(p)
    _search_flags(p)

    p = sub.add_parser("metrics", help="PassRate/HackRate over AT-verdict records")
    _common(p)
    p.add_argument("--basis", help="pipeline report giving each problem's basis code ids")

    p = sub.add_parser("synth", help="write a synthetic corpus")
    _common(p, needs_in=False)
    p.add_argument("--problems", type=int, default=1)
    p.add_argument("--planted-rank", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--dependent", type=int)
    p.add_argument("--noise", type=int)
    p.add_argument("--overlap-bias", type=float, default=0.5)

    p = sub.add_parser("pipeline", help="full corpus run")
    _common(p)
    _filter_flags(p)
    _search_flags(p)
    p.add_argument("--quantile", type=float, default=0.2)
    p.add_argument("--correct-k", type=int, default=8)
    return parser


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FAULTBASIS_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"FAULTBASIS_SEED={env!r} is not an integer") from None
    return 0


@contextlib.contextmanager
def _output(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _load_matrices(path):
    """Yield ``(problem_id, matrix or None, failure reason or None)`` from either input format."""
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    if rio.looks_like_records(path):
        for b in rio.ingest(path):
            try:
                yield b.problem_id, build_matrix(b.problem_id, b.wrong), None
            except FaultBasisError as e:
                yield b.problem_id, None, f"{type(e).__name__}: {e}"
        return
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    for M in parse_matrices(text):
        for cid, r in zip(M.row_ids, M.rows):
            if r.bits == 0:
                raise ParseError(0, f"problem {M.problem_id}: row {cid} has no failures")
        yield M.problem_id, M, None


def _configs(args):
    fcfg = FilterConfig(tau=args.tau, min_rank=args.min_rank)
    scfg = None
    if hasattr(args, "restarts"):
        scfg = SearchConfig(restarts=args.restarts, max_steps=args.steps, seed=_seed(args))
    return fcfg, scfg


def _cmd_filter(args, out):
    fcfg, _ = _configs(args)
    recs, accepted = [], []
    for pid, M, reason in _load_matrices(args.inp):
        if M is None:
            recs.append({"problem_id": pid, "outcome": Outcome.FAILED.value, "reason": reason})
            continue
        Mp, report = prefilter_problem(M, fcfg)
        recs.append(report.to_record())
        if Mp is not None:
            accepted.append(Mp)
    if args.format == "records":
        rio.write_records(recs, out)
    else:
        out.write(format_matrices(accepted))


def _select_all(args):
    fcfg, scfg = _configs(args)
    for pid, M, reason in _load_matrices(args.inp):
        if M is None:
            yield {"problem_id": pid, "outcome": Outcome.FAILED.value, "reason": reason}, None, None
            continue
        Mp, report = prefilter_problem(M, fcfg)
        rec = {"problem_id": pid, "outcome": report.outcome.value}
        if Mp is None:
            yield rec, None, None
            continue
        sel, trace = wrong_select(Mp, replace(scfg, seed=derive_seed(scfg.seed, pid, "search")),
                                  workers=args.workers)
        rec["selection"] = selection_record(Mp, sel, trace)
        yield rec, Mp, sel


def _cmd_select(args, out):
    recs, blocks = [], []
    for rec, Mp, sel in _select_all(args):
        recs.append(rec)
        if sel is not None:
            blocks.append(Mp.take(sel.indices))
    if args.format == "records":
        rio.write_records(recs, out)
    else:
        out.write(format_matrices(blocks))


def _cmd_reduce(args, out):
    recs, blocks = [], []
    for rec, Mp, sel in _select_all(args):
        if sel is not None:
            cols = reduce_tests(Mp, sel)
            check_reduction(Mp, sel, cols)
            rec = {"problem_id": rec["problem_id"], "outcome": rec["outcome"], "rank": sel.rank,
                   "code_ids": sel.code_ids(Mp), "test_columns": cols}
            blocks.append(Mp.take(sel.indices).restrict_columns(cols))
        recs.append(rec)
    if args.format == "records":
        rio.write_records(recs, out)
    else:
        out.write(format_matrices(blocks))


def _basis_from_report(path) -> dict[str, list[str]]:
    basis = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, obj in rio._objects(fh):
            sel = obj.get("selection")
            if obj.get("kind", "problem") == "problem" and sel is not None:
                basis[obj["problem_id"]] = list(sel["code_ids"])
    return basis


def _cmd_metrics(args, out):
    if not os.path.exists(args.inp):
        raise UsageError(f"no such file: {args.inp}")
    tests = rio.read_at_records(args.inp)
    by_problem: dict[str, list] = {}
    for t in tests:
        by_problem.setdefault(t.problem_id, []).append(t)
    if args.basis:
        basis = _basis_from_report(args.basis)
        pids = list(basis)
    else:
        basis = {}
        for pid, ts in by_problem.items():
            basis[pid] = list(dict.fromkeys(cid for t in ts for cid in t.wrong_verdicts))
        pids = list(by_problem)
    report = hack_rate((pid, basis[pid], by_problem.get(pid, [])) for pid in pids)
    if args.format == "records":
        rio.write_records(report.to_records(), out)
    else:
        out.write(report.to_text())


def _cmd_synth(args, out):
    seed = _seed(args)
    if args.format == "text":
        blocks = []
        for p in range(args.problems):
            if args.planted_rank is None or args.d is None:
                raise UsageError("text output needs --planted-rank and --d")
            spec = SynthSpec(args.planted_rank, args.d, args.dependent or 0, args.noise or 0,
                             args.overlap_bias, derive_seed(seed, f"p{p:04d}", "synth"))
            blocks.append(synth(spec, problem_id=f"p{p:04d}").matrix)
        out.write(format_matrices(blocks))
        return
    bundles = synth_corpus(args.problems, seed, args.planted_rank, args.d, args.dependent, args.noise,
                           args.overlap_bias)
    rio.write_records(rio.bundle_records(bundles), out)


def _cmd_pipeline(args, out):
    if not os.path.exists(args.inp):
        raise UsageError(f"no such file: {args.inp}")
    fcfg, scfg = _configs(args)
    cfg = PipelineConfig(fcfg, scfg, args.quantile, args.correct_k)
    report = run_pipeline(rio.ingest(args.inp), cfg, workers=args.workers)
    if args.format == "records":
        rio.write_records(report.to_records(), out)
        return
    for r in report.problems:
        line = f"{r['problem_id']:<16} {r['outcome']:<24}"
        if "selection" in r:
            s = r["selection"]
            line += f" rank={s['rank']:<3} F={s['diversity']:.4f} tests={len(r['test_columns'])}"
        elif "reason" in r:
            line += f" {r['reason']}"
        out.write(line + "\n")
    t = report.totals
    out.write(f"accepted {t['problems_accepted']}/{t['problems_in']} problems, "
              f"selected {t['codes_selected']}/{t['codes_in']} wrong codes "
              f"({percent(t['codes_selected'] / t['codes_in']) if t['codes_in'] else 0:.2f}%)\n")


_COMMANDS = {
    "filter": _cmd_filter,
    "select": _cmd_select,
    "reduce-tests": _cmd_reduce,
    "metrics": _cmd_metrics,
    "synth": _cmd_synth,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        with _output(args.out) as out:
            _COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"faultbasis: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"faultbasis: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as e:
        print(f"faultbasis: invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FaultBasisError, ValueError) as e:
        print(f"faultbasis: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
