from faultbasis.pipeline import PipelineConfig, derive_seed, reduce_tests, run_pipeline
from faultbasis.prefilter import FilterConfig
from faultbasis.records import ProblemBundle, dumps
from faultbasis.sigmatrix import Verdict, VerdictMatrix
from faultbasis.synth import synth_corpus
from faultbasis.wrongselect import SearchConfig, wrong_select


def bundle_from_rows(pid, rows, correct=(("c0", 10), ("c1", 10))):
    b = ProblemBundle(pid)
    for i, s in enumerate(rows):
        b.wrong.append((f"w{i}", tuple(Verdict.WA if ch == "1" else Verdict.AC for ch in s)))
    b.correct = list(correct)
    return b


def small_cfg(min_rank=2, restarts=50):
    return PipelineConfig(FilterConfig(min_rank=min_rank), SearchConfig(restarts=restarts, seed=1))


def test_toy_problem():
    rep = run_pipeline([bundle_from_rows("toy", ["001", "011", "010"])], small_cfg())
    (p,) = rep.problems
    assert p["outcome"] == "Accepted"
    assert sorted(p["selection"]["code_ids"]) == ["w0", "w2"]
    assert p["selection"]["diversity_exact"] == "0/1"
    assert p["test_columns"] == [1, 2]
    assert sorted(p["correct_codes"]) == ["c0", "c1"]


def test_all_ones_problem_isolated():
    good = bundle_from_rows("good", ["0011", "0101", "1000", "0110"])
    bad = bundle_from_rows("bad", ["0011", "0101", "1001"])
    rep = run_pipeline([good, bad], small_cfg())
    outcome = {p["problem_id"]: p["outcome"] for p in rep.problems}
    assert outcome == {"good": "Accepted", "bad": "RejectedAllOnesColumn"}
    assert rep.totals["problems_rejected"]["RejectedAllOnesColumn"] == 1


def test_failed_problem_does_not_abort():
    broken = bundle_from_rows("broken", ["000", "011"])
    rep = run_pipeline([broken, bundle_from_rows("ok", ["001", "011", "010"])], small_cfg())
    assert rep.problems[0]["outcome"] == "Failed"
    assert "AllPassRow" in rep.problems[0]["reason"]
    assert rep.problems[1]["outcome"] == "Accepted"
    assert rep.totals["problems_failed"] == 1


def test_reduce_tests_examples():
    M = VerdictMatrix.from_strings(["001", "011", "010"])
    sel, _ = wrong_select(M, SearchConfig(restarts=5))
    assert reduce_tests(M, sel) == [1, 2]
    assert [str(M.rows[i].restrict([1, 2])) for i in sel.indices] == ["01", "10"]
    eye = VerdictMatrix.from_strings(["100", "010", "001"])
    sel, _ = wrong_select(eye, SearchConfig(restarts=2))
    assert reduce_tests(eye, sel) == [0, 1, 2]
    zero_col = VerdictMatrix.from_strings(["0101", "0011", "0110"])
    sel, _ = wrong_select(zero_col, SearchConfig(restarts=5))
    assert 0 not in reduce_tests(zero_col, sel)


def test_conservation_and_bounds():
    bundles = synth_corpus(20, seed=3)
    rep = run_pipeline(bundles, PipelineConfig(search=SearchConfig(restarts=40, seed=5)))
    t = rep.totals
    assert t["problems_in"] == 20
    assert t["problems_in"] == t["problems_accepted"] + t["problems_failed"] + sum(t["problems_rejected"].values())
    assert t["codes_in"] == t["codes_kept"] + t["codes_dropped"] + t["codes_deduped"] + t["codes_unprocessed"]
    for p in rep.problems:
        if p["outcome"] == "Accepted":
            assert len(p["test_columns"]) <= p["selection"]["rank"]
            assert len(p["correct_codes"]) <= 8


def test_worker_count_has_no_effect():
    bundles = synth_corpus(12, seed=8)
    cfg = PipelineConfig(search=SearchConfig(restarts=60, seed=2))
    ref = [dumps(r) for r in run_pipeline(bundles, cfg, workers=1).to_records()]
    for w in (2, 5):
        assert [dumps(r) for r in run_pipeline(bundles, cfg, workers=w).to_records()] == ref


def test_derive_seed_stable():
    assert derive_seed(1, "p", "search") == derive_seed(1, "p", "search")
    assert derive_seed(1, "p", "search") != derive_seed(1, "q", "search")
    assert derive_seed(1, "p", "search") != derive_seed(2, "p", "search")
    assert 0 <= derive_seed(-5, "p", "x") < 2**64
