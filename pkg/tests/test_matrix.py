import pytest
from hypothesis import given, settings, strategies as st

from src.algebra.counting import rank_count
from src.algebra.gf import field_from_order
from src.algebra.matrix import (
    Mat,
    column_space,
    enumerate_matrices,
    full_rank_count,
    full_rank_matrices,
    is_full_rank,
    kernel,
    matadd,
    matmul,
    rank,
    rank_census,
    row_space,
    span,
    transpose,
    vec_from_index,
    vec_index,
    vec_matmul,
)
from src.errors import EnumerationTooLarge, FieldMismatch, ParameterOutOfRange, ShapeMismatch


class TestMat:
    def test_index_is_row_major_base_q(self, gf2):
        X = Mat.from_rows(gf2, [[1, 0], [0, 1]])
        assert X.index == 0b1001
        assert Mat.from_index(gf2, 2, 2, 9) == X

    def test_entry_validation(self, gf2):
        with pytest.raises(ParameterOutOfRange):
            Mat.from_rows(gf2, [[2, 0]])
        with pytest.raises(ShapeMismatch):
            Mat.from_rows(gf2, [[1, 0], [1]])

    def test_rows_and_columns(self, gf3):
        X = Mat.from_rows(gf3, [[1, 2, 0], [0, 1, 1]])
        assert X.shape == (2, 3)
        assert X.col(1) == (2, 1)
        assert transpose(X).rows() == X.columns()
        assert Mat.from_columns(gf3, X.columns()) == X

    def test_field_mismatch(self, gf2, gf3):
        with pytest.raises(FieldMismatch):
            matadd(Mat.zeros(gf2, 2, 2), Mat.zeros(gf3, 2, 2))

    def test_shape_mismatch(self, gf2):
        with pytest.raises(ShapeMismatch):
            matmul(Mat.zeros(gf2, 2, 3), Mat.zeros(gf2, 2, 3))


class TestLinearAlgebra:
    def test_rank(self, gf2, gf3):
        assert rank(Mat.identity(gf2, 3)) == 3
        assert rank(Mat.from_rows(gf2, [[1, 1], [1, 1]])) == 1
        assert rank(Mat.from_rows(gf3, [[1, 2], [2, 1]])) == 1
        assert rank(Mat.zeros(gf3, 2, 4)) == 0

    def test_full_rank_rectangular(self, gf2):
        assert is_full_rank(Mat.from_rows(gf2, [[1, 0, 0], [0, 0, 1]]))
        assert not is_full_rank(Mat.from_rows(gf2, [[1, 0, 1], [1, 0, 1]]))

    def test_row_and_column_space(self, gf2):
        X = Mat.from_rows(gf2, [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert row_space(X) == ((1, 0, 1), (0, 1, 1))
        assert len(column_space(X)) == 2

    def test_kernel(self, gf3):
        X = Mat.from_rows(gf3, [[1, 1, 1]])
        basis = kernel(X)
        assert len(basis) == 2
        for v in basis:
            assert vec_matmul(v, transpose(X)) == (0,)
        assert kernel(X, "left") == []

    def test_vec_matmul(self, gf2):
        X = Mat.from_rows(gf2, [[1, 0, 1], [0, 1, 1]])
        assert vec_matmul((1, 1), X) == (1, 1, 0)

    def test_vector_index_round_trip(self):
        assert vec_index((1, 2, 0), 3) == 15
        assert vec_from_index(15, 3, 3) == (1, 2, 0)

    def test_span(self, gf3):
        assert len(span([(1, 0, 0), (0, 1, 1)], gf3, 3)) == 9
        assert span([], gf3, 2) == [(0, 0)]


class TestEnumeration:
    def test_cap_raises(self, gf2):
        with pytest.raises(EnumerationTooLarge):
            list(enumerate_matrices(3, 3, gf2, cap=100))

    def test_canonical_order(self, gf2):
        indices = [X.index for X in enumerate_matrices(2, 2, gf2)]
        assert indices == list(range(16))

    @pytest.mark.parametrize("q,m,n", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (4, 2, 2), (2, 3, 2)])
    def test_full_rank_count(self, q, m, n):
        field = field_from_order(q)
        assert len(full_rank_matrices(m, n, field)) == full_rank_count(m, n, q)

    @pytest.mark.parametrize("q,m,n", [(2, 2, 3), (3, 2, 2), (2, 3, 3)])
    def test_rank_census_matches_closed_form(self, q, m, n):
        field = field_from_order(q)
        census = rank_census(m, n, field)
        assert census == {r: rank_count(m, n, r, q) for r in range(min(m, n) + 1)}


@settings(max_examples=50)
@given(st.lists(st.integers(0, 2), min_size=6, max_size=6), st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_rank_is_subadditive(a, b):
    field = field_from_order(3)
    A, B = Mat(field, 2, 3, tuple(a)), Mat(field, 2, 3, tuple(b))
    assert rank(matadd(A, B)) <= rank(A) + rank(B)
    assert rank(A) == rank(transpose(A))
