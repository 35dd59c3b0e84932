from fractions import Fraction

import numpy as np
import pytest

from faultbasis import kernels
from faultbasis.errors import TooLarge
from faultbasis.sigmatrix import Signature, VerdictMatrix, avg_diversity, in_span, is_independent, rank
from faultbasis.wrongselect import (SearchConfig, best_neighbor, brute_force_best_basis, local_search,
                                    random_basis, restart_rng, wrong_select)

from instances import planted_instance
from oracles import brute_independent, random_matrix_rows, reference_descent


def rows_of(M, idx):
    return [str(M.rows[i]) for i in idx]


class TestRandomBasis:
    def test_toy_any_pair(self, toy, backend):
        seen = set()
        for s in range(40):
            I = random_basis(toy, np.random.default_rng(s), backend=backend)
            assert len(I) == 2 and brute_independent([toy.rows[i].bits for i in I])
            seen.add(I)
        assert seen == {(0, 1), (0, 2), (1, 2)}

    def test_identity_unique(self, backend):
        M = VerdictMatrix.from_strings(["100", "010", "001"])
        assert random_basis(M, np.random.default_rng(0), backend=backend) == (0, 1, 2)

    def test_rank_one(self, backend):
        M = VerdictMatrix.from_strings(["11", "11"])
        assert random_basis(M, np.random.default_rng(3), backend=backend) in {(0,), (1,)}

    def test_wide_rows(self, backend):
        # more than 64 columns exercises multi-word rows
        rng = np.random.default_rng(2)
        d = 150
        rows = [r for r in random_matrix_rows(rng, 30, d, 0.3) if r]
        M = VerdictMatrix("w", tuple(Signature(r, d) for r in rows), tuple(map(str, range(len(rows)))), d)
        I = random_basis(M, np.random.default_rng(1), backend=backend)
        assert len(I) == rank(M)
        assert is_independent([M.rows[i] for i in I])


class TestBestNeighbor:
    def test_toy_improves(self, toy):
        assert best_neighbor((0, 1), toy, Fraction(1, 2)) == ((0, 2), 0)

    def test_non_improving_swap_not_returned(self, toy):
        # swapping 001 out for 010 gives {011, 010} with F = 1/2: not an improvement
        assert avg_diversity([toy.rows[1], toy.rows[2]]) == Fraction(1, 2)
        nb = best_neighbor((0, 1), toy, Fraction(1, 2))
        assert nb[0] != (1, 2)

    def test_local_optimum(self, toy):
        assert best_neighbor((0, 2), toy, Fraction(0)) is None

    def test_swaps_keep_rank(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            M = planted_instance(int(rng.integers(1000)))
            I = random_basis(M, rng, backend="numpy")
            nb = best_neighbor(I, M, avg_diversity([M.rows[i] for i in I]))
            if nb is None:
                continue
            new, f = nb
            (r_out,) = set(I) - set(new)
            (r_in,) = set(new) - set(I)
            kept = [M.rows[i] for i in I if i != r_out]
            assert not in_span(M.rows[r_in], kept)
            assert rank(M.take(new)) == rank(M)


class TestLocalSearch:
    def test_toy_one_step(self, toy, backend):
        assert local_search((0, 1), toy, 10, backend=backend) == ((0, 2), 0, 1)

    def test_fixed_point(self, toy, backend):
        assert local_search((0, 2), toy, 10, backend=backend) == ((0, 2), 0, 0)

    def test_matches_exhaustive_descent(self, backend):
        for seed in range(60):
            M = planted_instance(seed)
            ints = [r.bits for r in M.rows]
            I0 = random_basis(M, np.random.default_rng(seed + 100), backend="numpy")
            expected = reference_descent(ints, I0, 50)
            assert local_search(I0, M, 50, backend=backend) == expected, seed

    def test_matches_iterated_best_neighbor(self, backend):
        for seed in range(30):
            M = planted_instance(seed)
            I = random_basis(M, np.random.default_rng(seed), backend="numpy")
            f = avg_diversity([M.rows[i] for i in I])
            steps = 0
            while f > 0:
                nb = best_neighbor(I, M, f)
                if nb is None:
                    break
                I, f = nb
                steps += 1
            assert local_search(random_basis(M, np.random.default_rng(seed), backend="numpy"), M, 100,
                                backend=backend) == (I, f, steps)

    def test_step_budget(self, backend):
        kern = kernels.get_backend(backend)
        for seed in range(1, 40, 2):
            M = planted_instance(seed)
            start = np.asarray(random_basis(M, np.random.default_rng(seed), backend=backend))
            _, hist, steps, term = kern.local_search(M.packed, M.popcounts, start, 1, True, kernels.EPS)
            assert steps <= 1
            if steps == 1:
                # reaching F = 0 on the last allowed move reports zero-diversity instead
                expected = kernels.ZERO_DIVERSITY if hist[1] == 0 else kernels.STEP_BUDGET
                assert term == expected
                assert hist[1] < hist[0]


class TestBackendsAgree:
    """The numba loops and the numpy vectorisation must give bit-identical searches."""

    @pytest.mark.skipif("numba" not in kernels.available_backends(), reason="numba not installed")
    def test_random_instances(self):
        rng = np.random.default_rng(99)
        for trial in range(40):
            n = int(rng.integers(5, 60))
            d = int(rng.integers(4, 140))
            rows = [r for r in random_matrix_rows(rng, n, d, rng.uniform(0.1, 0.5)) if r]
            if not rows:
                continue
            M = VerdictMatrix("r", tuple(Signature(r, d) for r in rows), tuple(map(str, range(len(rows)))), d)
            cfg = SearchConfig(restarts=5, max_steps=50, seed=trial)
            a, ta = wrong_select(M, cfg, backend="numba")
            b, tb = wrong_select(M, cfg, backend="numpy")
            assert a == b
            assert [r.indices for r in ta.restarts] == [r.indices for r in tb.restarts]
            assert [r.steps for r in ta.restarts] == [r.steps for r in tb.restarts]
            np.testing.assert_allclose([r.final_f for r in ta.restarts], [r.final_f for r in tb.restarts],
                                       rtol=0, atol=1e-12)


class TestWrongSelect:
    def test_toy(self, toy, backend):
        for seed in range(5):
            sel, _ = wrong_select(toy, SearchConfig(restarts=3, seed=seed), backend=backend)
            assert rows_of(toy, sel.indices) == ["001", "010"]
            assert sel.diversity == 0 and sel.rank == 2

    def test_disjoint_rows_stop_at_first_restart(self, backend):
        M = VerdictMatrix.from_strings(["1100", "0010", "0001"])
        sel, trace = wrong_select(M, SearchConfig(restarts=50), backend=backend)
        assert sel.diversity == 0 and sel.restarts_used == 1
        assert trace.restarts[0].terminated_by == "zero-diversity"

    def test_no_early_stop_runs_all_restarts(self, toy):
        sel, trace = wrong_select(toy, SearchConfig(restarts=7, early_stop_on_zero=False))
        assert sel.restarts_used == 7 and len(trace.restarts) == 7
        assert sel.diversity == 0

    def test_deterministic_and_worker_independent(self, backend):
        for seed in range(1, 20, 2):
            M = planted_instance(seed)
            cfg = SearchConfig(restarts=40, max_steps=30, seed=seed)
            ref = wrong_select(M, cfg, backend=backend)
            for workers in (1, 3, 8):
                sel, trace = wrong_select(M, cfg, workers=workers, backend=backend)
                assert sel == ref[0]
                assert trace == ref[1]

    def test_basis_and_diversity_roundtrip(self, backend):
        for seed in range(20):
            M = planted_instance(seed)
            sel, trace = wrong_select(M, SearchConfig(restarts=20, seed=seed), backend=backend)
            rows = [M.rows[i] for i in sel.indices]
            assert len(rows) == rank(M) and is_independent(rows)
            assert sel.diversity == avg_diversity(rows)
            for rec in trace.restarts:
                assert all(b < a for a, b in zip(rec.f_history, rec.f_history[1:]))
                assert rec.final_f <= rec.initial_f

    def test_restart_streams_are_derived(self):
        a = restart_rng(5, 3).permutation(20)
        b = restart_rng(5, 3).permutation(20)
        c = restart_rng(5, 4).permutation(20)
        assert (a == b).all() and not (a == c).all()

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)
        with pytest.raises(ValueError):
            SearchConfig(max_steps=0)


class TestBruteForce:
    def test_toy(self, toy):
        assert brute_force_best_basis(toy) == ((0, 2), 0)

    def test_identity(self):
        M = VerdictMatrix.from_strings(["100", "010", "001"])
        assert brute_force_best_basis(M) == ((0, 1, 2), 0)

    def test_four_rows_rank_three(self):
        M = VerdictMatrix.from_strings(["110", "011", "101", "111"])
        assert rank(M) == 3
        # enumerate the four 3-subsets by hand: {110,011,101} is dependent (XOR = 0);
        # every subset containing 111 has two pairs at 2/3 and one at 1/3 -> F = 5/9
        assert brute_force_best_basis(M) == ((0, 1, 3), Fraction(5, 9))

    def test_cap(self):
        M = VerdictMatrix.from_strings(["100", "010", "001", "110", "011"])
        with pytest.raises(TooLarge):
            brute_force_best_basis(M, cap=5)

    def test_search_never_beats_oracle(self):
        for seed in range(30):
            M = planted_instance(seed)
            _, f_opt = brute_force_best_basis(M)
            sel, _ = wrong_select(M, SearchConfig(restarts=30, max_steps=50, seed=seed))
            assert sel.diversity >= f_opt
