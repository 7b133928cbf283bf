import pytest
from pydantic import ValidationError

from src.algebra.matrix import enumerate_matrices
from src.errors import BudgetExhausted, EnumerationTooLarge
from src.geometry.flats import PointSet, _bits, build_22set, flat_system, is_k_dense
from src.geometry.search import (
    DenseSetSearch,
    DenseSetSolver,
    _TaskLedger,
    all_mrd_subsets,
    dense_sets_of_minimum_size,
    enumerate_blocking_sets,
    find_mrd_subset,
    min_dense_size,
    verify_plane_lemma,
)
from src.models import SearchConfig


def run(m, n, k, **kwargs):
    return min_dense_size(SearchConfig(m=m, n=n, q=2, k=k, **kwargs))


class TestMinimum:
    @pytest.mark.parametrize("m,n,k,expected", [(2, 1, 1, 3), (2, 2, 1, 4), (2, 3, 1, 8), (3, 2, 1, 6)])
    def test_small_minima(self, m, n, k, expected):
        result = run(m, n, k)
        assert result.minimum == expected
        assert result.proof
        assert len(result.witness_indices) == expected

    def test_witness_is_dense(self, gf2):
        result = run(3, 2, 1)
        S = PointSet.from_indices(gf2, 3, 2, result.witness_indices)
        assert is_k_dense(S, 1)
        assert result.symmetry == "translation"

    def test_section_first_mode_for_lines(self):
        solver = DenseSetSolver(SearchConfig(m=3, n=2, q=2, k=2))
        assert solver.mode == "section-first"
        assert solver.perms is not None and len(solver.perms) == 2304

    def test_translation_mode_without_sections(self):
        assert run(2, 1, 1).symmetry == "translation"

    def test_without_symmetry(self):
        result = run(2, 2, 1, symmetry=False)
        assert result.minimum == 4
        assert result.symmetry == "none"

    def test_seeded_order_gives_same_minimum(self):
        assert run(3, 2, 1, seed=11).minimum == 6

    def test_parallel_decide(self):
        assert run(3, 2, 1, threads=2).minimum == 6

    def test_witness_independent_of_threads(self):
        one, two = run(3, 2, 1), run(3, 2, 1, threads=2)
        assert one.witness_indices == two.witness_indices
        assert one.proof and two.proof

    def test_ternary_line(self):
        result = min_dense_size(SearchConfig(m=2, n=1, q=3, k=1))
        assert result.minimum == 5


class TestBranching:
    def test_branches_on_first_flat(self, gf2):
        search = DenseSetSearch(3, 2, 1, gf2)
        assert search.branch_points(0, 0) == sorted(_bits(search.masks[0]))

    def test_skips_blocked_flats(self, gf2):
        search = DenseSetSearch(3, 2, 1, gf2)
        p = search.branch_points(0, 0)[0]
        include = 1 << p
        first = next(fm for fm in search.masks if not fm & include)
        assert search.branch_points(include, 0) == sorted(_bits(first))

    def test_excluded_points_left_out(self, gf2):
        search = DenseSetSearch(3, 2, 1, gf2)
        points = search.branch_points(0, 0)
        assert search.branch_points(0, 1 << points[0]) == points[1:]

    def test_nothing_left_to_block(self, gf2):
        search = DenseSetSearch(2, 1, 1, gf2)
        assert search.branch_points(search.full, 0) is None


class TestDecide:
    def test_infeasible_below_minimum(self):
        result = run(3, 2, 1, target="decide", decide_size=5)
        assert result.feasible is False
        assert result.proof

    def test_feasible_at_minimum(self):
        result = run(3, 2, 1, target="decide", decide_size=6)
        assert result.feasible is True
        assert len(result.witness_indices) <= 6

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SearchConfig(m=3, n=2, q=2, k=3)
        with pytest.raises(ValidationError):
            SearchConfig(m=3, n=2, q=2, k=1, target="decide")


class TestBudget:
    def test_exhausted_budget_keeps_partial_result(self):
        with pytest.raises(BudgetExhausted) as info:
            run(3, 2, 2, node_budget=1)
        partial = info.value.result
        assert partial is not None
        assert partial.proof is False
        assert partial.minimum >= 22
        assert partial.lower_bound <= 22

    @pytest.mark.parametrize("node_budget", [40, 400])
    def test_tight_budget_same_for_any_thread_count(self, node_budget):
        outcomes = []
        for threads in (1, 2):
            with pytest.raises(BudgetExhausted) as info:
                run(3, 2, 2, node_budget=node_budget, threads=threads)
            outcomes.append(info.value.result.model_dump(exclude={"seconds"}))
        assert outcomes[0] == outcomes[1]

    def test_decide_same_for_any_thread_count(self):
        one = run(3, 2, 1, target="decide", decide_size=6)
        two = run(3, 2, 1, target="decide", decide_size=6, threads=2)
        assert one.model_dump(exclude={"seconds"}) == two.model_dump(exclude={"seconds"})


class TestTaskLedger:
    def test_charges_in_order(self):
        ledger = _TaskLedger(100)
        assert not ledger.record(None, 30, False)
        assert ledger.limit == 70
        assert ledger.record(0b101, 20, False)
        assert ledger.witness == 0b101
        assert ledger.nodes == 50
        assert not ledger.exhausted

    def test_task_over_remaining_budget_counts_as_hit(self):
        ledger = _TaskLedger(100)
        ledger.record(None, 90, False)
        # finished under the full budget, but only 10 nodes were left
        assert ledger.record(0b1, 40, False)
        assert ledger.exhausted
        assert ledger.witness is None
        assert ledger.nodes == 90 + 11

    def test_hit_stops(self):
        ledger = _TaskLedger(10)
        assert ledger.record(None, 11, True)
        assert ledger.exhausted and ledger.nodes == 11


class TestBounds:
    def test_lower_bound_and_greedy_bracket_the_minimum(self, gf2):
        search = DenseSetSearch(3, 2, 1, gf2)
        assert search.lower_bound() <= 6 <= search.greedy().bit_count()

    def test_greedy_is_dense(self, gf2):
        search = DenseSetSearch(3, 2, 2, gf2)
        assert is_k_dense(PointSet.from_mask(gf2, 3, 2, search.greedy()), 2)


@pytest.mark.slow
def test_line_blocking_minimum_is_22():
    result = run(3, 2, 2)
    assert result.minimum == 22
    assert result.proof


class TestMrdSubsets:
    def test_binary_plane_has_eight_mrd_codes(self, gf2):
        full = PointSet(enumerate_matrices(2, 2, gf2))
        assert len(all_mrd_subsets(full, 1)) == 8

    def test_22_set_contains_mrd_code(self):
        code = find_mrd_subset(build_22set(), 1)
        assert code is not None
        assert len(code) == 8

    def test_too_small_set(self, gf2):
        S = PointSet.from_indices(gf2, 2, 2, [0, 1, 2])
        assert find_mrd_subset(S, 1) is None


class TestExhaustiveChecks:
    def test_plane_lemma(self):
        report = verify_plane_lemma()
        assert report["mrd_codes"] == 8
        assert report["holds"]
        assert report[5]["blocking_sets"] > 0

    @pytest.mark.parametrize("size", [7, 8])
    def test_large_blocking_sets_leave_noncollinear_points(self, size):
        report = verify_plane_lemma()
        assert report[size]["blocking_sets"] > 0
        assert report[size]["holds"]

    def test_minimum_dense_sets_are_mrd(self, gf2):
        assert dense_sets_of_minimum_size(2, 2, 1, gf2) == {"size": 4, "dense_sets": 8, "all_mrd": True}

    def test_blocking_sets_of_lines(self, gf2):
        system = flat_system("right", 2, 2, gf2, 1)
        assert enumerate_blocking_sets(system, 3) == []
        assert len(enumerate_blocking_sets(system, 4)) == 8

    def test_exhaustion_guard(self, gf2):
        with pytest.raises(EnumerationTooLarge):
            dense_sets_of_minimum_size(2, 3, 1, gf2)
