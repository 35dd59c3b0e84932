import pytest

from faultbasis.errors import InfeasibleSpec
from faultbasis.sigmatrix import avg_diversity, rank
from faultbasis.synth import SynthSpec, synth, synth_corpus
from faultbasis.wrongselect import SearchConfig, brute_force_best_basis, wrong_select


def test_planted_three_of_nine():
    res = synth(SynthSpec(planted_rank=3, d=9, extra_dependent_rows=4, seed=1))
    M = res.matrix
    assert rank(M) == 3
    planted = [M.rows[i] for i in res.planted]
    assert avg_diversity(planted) == 0
    assert brute_force_best_basis(M)[1] == 0
    sel, _ = wrong_select(M, SearchConfig(restarts=20, seed=4))
    assert sel.diversity == 0


def test_full_rank_is_identity_like():
    M = synth(SynthSpec(planted_rank=5, d=5, seed=2)).matrix
    assert sorted(r.popcount for r in M.rows) == [1] * 5
    assert rank(M) == 5


@pytest.mark.parametrize("spec", [
    SynthSpec(planted_rank=4, d=3),
    SynthSpec(planted_rank=0, d=3),
    SynthSpec(planted_rank=2, d=3, overlap_bias=1.5),
])
def test_infeasible(spec):
    with pytest.raises(InfeasibleSpec):
        synth(spec)


@pytest.mark.parametrize("seed", range(10))
def test_rank_bounds(seed):
    spec = SynthSpec(planted_rank=4, d=12, extra_dependent_rows=6, noise_rows=2, seed=seed)
    M = synth(spec).matrix
    assert spec.planted_rank <= rank(M) <= spec.planted_rank + spec.noise_rows
    assert all(r.bits for r in M.rows)


def test_deterministic():
    spec = SynthSpec(planted_rank=3, d=10, extra_dependent_rows=5, noise_rows=1, seed=9)
    assert synth(spec) == synth(spec)
    assert synth_corpus(3, seed=4) == synth_corpus(3, seed=4)
