import pytest

from src.algebra.matrix import Mat, enumerate_matrices, full_rank_matrices
from src.codes.rank_metric import (
    MatrixCode,
    VectorMap,
    binary_2x2_mrd_codes,
    companion_matrix,
    field_code_orbit_count,
    find_complete_mapping,
    gabidulin,
    is_affine_map,
    is_complete_mapping,
    is_mrd,
    is_mrd_map,
    is_orthomorphism,
    iter_complete_mappings,
    map_to_mrd,
    matrix_field,
    mrd_from_field,
    mrd_to_map,
    rank_distance,
    rank_distance_witness,
    singleton_bound,
)
from src.errors import CodeTooSmall, NotFullRank, NotRepresentable, ParameterOutOfRange, ShapeMismatch


class TestMatrixCode:
    def test_canonical_order_and_distinctness(self, gf2):
        X = Mat.from_rows(gf2, [[1, 0], [0, 1]])
        Z = Mat.zeros(gf2, 2, 2)
        code = MatrixCode([X, Z])
        assert code.codewords == (Z, X)
        with pytest.raises(ParameterOutOfRange):
            MatrixCode([X, X])

    def test_empty_and_mixed_shapes(self, gf2):
        with pytest.raises(CodeTooSmall):
            MatrixCode([])
        with pytest.raises(ShapeMismatch):
            MatrixCode([Mat.zeros(gf2, 2, 2), Mat.zeros(gf2, 2, 3)])

    def test_rank_distance_needs_two_words(self, gf2):
        with pytest.raises(CodeTooSmall):
            rank_distance(MatrixCode([Mat.zeros(gf2, 2, 2)]))

    def test_linearity(self):
        A, _ = binary_2x2_mrd_codes()
        assert A.is_linear
        assert not A.translate(Mat.identity(A.field, 2)).is_linear

    def test_singleton_bound(self):
        assert singleton_bound(3, 2, 2, 2) == 8
        assert singleton_bound(2, 3, 2, 1) == 64


class TestIsMrd:
    def test_binary_2x2_codes(self):
        for code in binary_2x2_mrd_codes():
            verdict = is_mrd(code, 1)
            assert verdict
            assert verdict.criteria == {"size_distance": True, "surjectivity": True}

    def test_cosets_stay_mrd(self, gf2):
        A, _ = binary_2x2_mrd_codes()
        for B in enumerate_matrices(2, 2, gf2):
            assert is_mrd(A.translate(B), 1)

    def test_failure_carries_witness(self, gf2):
        code = MatrixCode(Mat.from_index(gf2, 2, 2, i) for i in (0, 1, 6, 9))
        verdict = is_mrd(code, 1)
        assert not verdict
        X, Y = verdict.witness
        assert rank_distance_witness(code)[1] == (X, Y)
        assert verdict.rank_distance == 1

    def test_k_out_of_range(self):
        A, _ = binary_2x2_mrd_codes()
        with pytest.raises(ParameterOutOfRange):
            is_mrd(A, 3)


class TestGabidulin:
    @pytest.mark.parametrize("m,n,k", [(2, 2, 1), (2, 2, 2), (3, 2, 1), (3, 2, 2), (2, 3, 1), (3, 3, 2)])
    def test_binary_codes_are_mrd(self, gf2, m, n, k):
        code = gabidulin(m, n, k, gf2)
        assert len(code) == 2 ** (k * max(m, n))
        assert code.is_linear
        assert is_mrd(code, k)
        assert code.rank_distance == min(m, n) - k + 1

    def test_ternary(self, gf3):
        assert is_mrd(gabidulin(2, 2, 1, gf3), 1)

    def test_transpose_relation(self, gf2):
        assert gabidulin(2, 3, 1, gf2) == gabidulin(3, 2, 1, gf2).transpose()

    def test_needs_prime_base(self, gf4):
        with pytest.raises(ParameterOutOfRange):
            gabidulin(2, 2, 1, gf4)


class TestMatrixField:
    def test_verify(self, gf2):
        F = matrix_field(3, gf2)
        assert len(F) == 8
        assert F.verify()

    def test_every_full_rank_multiplier_gives_mrd(self, gf2):
        F = matrix_field(3, gf2)
        for A in full_rank_matrices(3, 2, gf2)[:12]:
            assert is_mrd(mrd_from_field(F, A), 1)

    def test_rejects_singular(self, gf2):
        F = matrix_field(2, gf2)
        with pytest.raises(NotFullRank):
            mrd_from_field(F, Mat.from_rows(gf2, [[1, 1], [1, 1]]))

    def test_orbit_count(self, gf2):
        assert field_code_orbit_count(3, 2, gf2) == 6


class TestCompleteMappings:
    def test_companion_matrix_orthomorphism(self, gf2):
        K = companion_matrix([1, 1, 1], gf2)
        f = VectorMap.linear(K)
        assert is_complete_mapping(f) and is_orthomorphism(f) and is_mrd_map(f)
        assert is_mrd(map_to_mrd(f), 1)

    def test_identity_is_not_complete_in_characteristic_two(self, gf2):
        assert not is_complete_mapping(VectorMap.identity(gf2, 2))

    def test_map_code_round_trip(self, gf2):
        f = VectorMap.linear(companion_matrix([1, 1, 0, 1], gf2))
        assert mrd_to_map(map_to_mrd(f)) == f

    def test_mrd_to_map_rejects_non_graph(self, gf2):
        code = MatrixCode([Mat.from_rows(gf2, [[0, 0], [0, 0]]), Mat.from_rows(gf2, [[0, 1], [0, 1]])])
        with pytest.raises(NotRepresentable):
            mrd_to_map(code)

    def test_binary_plane_mappings_are_affine(self, gf2):
        mappings = list(iter_complete_mappings(2, gf2))
        assert len(mappings) == 8
        assert all(is_affine_map(f) for f in mappings)
        with pytest.raises(NotRepresentable):
            find_complete_mapping(2, gf2)

    def test_dimension_three_mappings_are_affine(self, gf2):
        with pytest.raises(NotRepresentable):
            find_complete_mapping(3, gf2)

    def test_nonaffine_mapping_in_dimension_four(self, gf2):
        f = find_complete_mapping(4, gf2)
        assert is_complete_mapping(f)
        assert not is_affine_map(f)
        code = map_to_mrd(f)
        assert is_mrd(code, 1)
        assert not code.is_linear

    def test_complete_mapping_equals_mrd_in_characteristic_two(self, gf2):
        for f in iter_complete_mappings(2, gf2):
            assert is_mrd_map(f) == is_complete_mapping(f)


def test_irreducible_companion_gives_ternary_mrd_map(gf3):
    # x^2 + 1 has no root in GF(3), so xK - lam x is bijective for every lam
    f = VectorMap.linear(companion_matrix([1, 0, 1], gf3))
    assert is_mrd_map(f)
    assert is_mrd(map_to_mrd(f), 1)
