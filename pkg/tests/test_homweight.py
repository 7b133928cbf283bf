from fractions import Fraction

import pytest

from src.algebra.counting import SubspaceIterator
from src.algebra.matrix import Mat, rank
from src.codes.distributions import is_k_good
from src.codes.homweight import (
    HomogeneousWeight,
    coset_weight_sums,
    h3_report,
    hom_weight,
    is_cyclic_submodule,
    normalized_distribution,
    submodule,
    total_weight,
    weight_table,
)
from src.config import load_config
from src.errors import ParameterOutOfRange, ShapeMismatch


class TestWeights:
    def test_binary_2x3_tables(self, gf2):
        assert weight_table("left", 2, 3, gf2) == [(1, Fraction(1, 42)), (2, Fraction(1, 84))]
        assert weight_table("right", 2, 3, gf2) == [(1, Fraction(1, 56)), (2, Fraction(5, 336))]

    def test_raw_values(self, gf2):
        assert weight_table("left", 2, 3, gf2, normalized=False) == [(1, Fraction(4, 3)), (2, Fraction(2, 3))]

    def test_zero_matrix_has_weight_zero(self, gf3):
        assert hom_weight("right", 2, 2, gf3, Mat.zeros(gf3, 2, 2)) == 0

    def test_totals(self, gf2):
        assert total_weight("left", 2, 3, gf2) == 56
        assert total_weight("left", 3, 2, gf2) == 64
        assert total_weight("right", 2, 3, gf2) == 64

    @pytest.mark.parametrize("q", [2, 3])
    def test_closed_form_agrees_with_census_and_enumeration(self, q, gf2, gf3):
        field = gf2 if q == 2 else gf3
        for m in range(1, 4):
            for n in range(1, 4):
                if q ** (m * n) > 3**6:
                    continue
                for side in ("left", "right"):
                    w = HomogeneousWeight(side, m, n, field)
                    assert w.census_total() == w.closed_total() == w.brute_total()

    def test_census_fallback_over_cap(self, gf2):
        load_config(enumeration_cap=16)
        assert total_weight("left", 2, 3, gf2) == 56

    def test_bad_side_and_shape(self, gf2):
        with pytest.raises(ParameterOutOfRange):
            HomogeneousWeight("middle", 2, 2, gf2)
        with pytest.raises(ShapeMismatch):
            hom_weight("left", 2, 2, gf2, Mat.zeros(gf2, 2, 3))


class TestNormalizedDistributions:
    def test_right_weight_is_one_good(self, gf2):
        assert is_k_good(normalized_distribution("right", 2, 3, gf2), 1)

    def test_left_weight_is_not(self, gf2):
        verdict = is_k_good(normalized_distribution("left", 2, 3, gf2), 1)
        assert not verdict
        assert verdict.witness is not None

    def test_support_excludes_zero(self, gf2):
        D = normalized_distribution("left", 2, 2, gf2)
        assert Mat.zeros(gf2, 2, 2) not in D.support
        assert len(D) == 15


class TestSubmodules:
    def test_right_submodule(self, gf2):
        U = submodule("right", 2, 3, gf2, [(1, 0)])
        assert len(U) == 8
        assert all(X.row(1) == (0, 0, 0) for X in U)

    def test_left_submodule(self, gf2):
        U = submodule("left", 2, 3, gf2, [(1, 1, 0), (0, 0, 1)])
        assert len(U) == 16
        assert all(rank(X) <= 2 for X in U)

    def test_wrong_ambient(self, gf2):
        with pytest.raises(ShapeMismatch):
            submodule("right", 2, 3, gf2, [(1, 0, 0)])

    def test_zero_submodule(self, gf2):
        assert submodule("left", 2, 2, gf2, []) == [Mat.zeros(gf2, 2, 2)]

    def test_cyclic(self):
        assert is_cyclic_submodule("left", 2, 3, 2)
        assert not is_cyclic_submodule("left", 2, 3, 3)
        assert is_cyclic_submodule("right", 3, 2, 2)


class TestCosets:
    def test_2x3_line_cosets(self, gf2):
        sums = coset_weight_sums("right", 2, 3, gf2, [(1, 0)])
        assert len(sums) == 8
        assert sums[0].representative == Mat.zeros(gf2, 2, 3)
        assert sums[0].rank_census == {0: 1, 1: 7, 2: 0}
        for s in sums[1:]:
            assert s.rank_census == {0: 0, 1: 2, 2: 6}
        assert sum(s.total for s in sums) == 1

    def test_3x2_plane_cosets(self, gf2):
        for basis in SubspaceIterator(3, 2, gf2):
            sums = coset_weight_sums("right", 3, 2, gf2, basis)
            assert sums[0].rank_census == {0: 1, 1: 9, 2: 6}
            assert all(s.rank_census == {0: 0, 1: 4, 2: 12} for s in sums[1:])

    def test_weight_side_override(self, gf2):
        sums = coset_weight_sums("right", 2, 3, gf2, [(1, 0)], weight_side="left")
        assert sum(s.total for s in sums) == 1


class TestAverageProperty:
    def test_holds_on_cyclic_submodules(self, gf2):
        for side in ("left", "right"):
            for entry in h3_report(side, 2, 3, gf2):
                if entry.cyclic:
                    assert entry.holds

    def test_fails_on_non_cyclic_left_submodule(self, gf2):
        entries = [e for e in h3_report("left", 2, 3, gf2) if not e.cyclic]
        assert len(entries) == 1
        assert entries[0].size == 64
        assert entries[0].weight_sum == 56
        assert not entries[0].holds
