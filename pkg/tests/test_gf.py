import pickle

import galois
import pytest
from hypothesis import given, strategies as st

from src.algebra.gf import arith, elements, field_from_order, field_make
from src.errors import DivisionByZero, FieldTooLarge, NonPrimeCharacteristic, ParameterOutOfRange, ReducibleModulus


class TestFieldConstruction:
    def test_prime_field_indices_are_residues(self, gf3):
        assert gf3.q == 3
        assert gf3.is_prime_field
        assert gf3.add(2, 2) == 1
        assert gf3.mul(2, 2) == 1
        assert gf3.neg(1) == 2

    def test_default_moduli(self, gf4, gf8):
        assert gf4.modulus == (1, 1, 1)
        assert gf8.modulus == (1, 1, 0, 1)
        assert gf8.poly_string() == "1,1,0,1"

    def test_gf8_uses_a_cubed_equals_a_plus_one(self, gf8):
        a = 2
        assert gf8.pow(a, 3) == gf8.add(a, 1)

    def test_non_prime_characteristic(self):
        with pytest.raises(NonPrimeCharacteristic):
            field_make(4)
        with pytest.raises(NonPrimeCharacteristic):
            field_from_order(6)

    def test_reducible_modulus(self):
        # x^2 + 1 = (x + 1)^2 over GF(2)
        with pytest.raises(ReducibleModulus):
            field_make(2, 2, [1, 0, 1])

    def test_non_monic_modulus(self):
        with pytest.raises(ParameterOutOfRange):
            field_make(2, 2, [1, 1, 0])

    def test_too_large(self):
        with pytest.raises(FieldTooLarge):
            field_from_order(2**17)

    def test_from_order_with_custom_modulus(self):
        f = field_from_order(8, [1, 0, 1, 1])
        assert f.q == 8 and f.modulus == (1, 0, 1, 1)
        assert f != field_from_order(8)

    def test_cached_and_picklable(self, gf8):
        assert field_make(2, 3) is gf8
        assert pickle.loads(pickle.dumps(gf8)) == gf8


class TestArithmetic:
    def test_inverse_of_zero(self, gf4):
        with pytest.raises(DivisionByZero):
            gf4.inv(0)
        with pytest.raises(DivisionByZero):
            gf4.div(1, 0)

    def test_zero_powers(self, gf4):
        assert gf4.pow(0, 0) == 1
        assert gf4.pow(0, 3) == 0
        with pytest.raises(DivisionByZero):
            gf4.pow(0, -1)

    def test_primitive_element_generates(self, gf8):
        g = gf8.primitive_elem
        assert gf8.order(g) == 7
        assert sorted(gf8.antilog(i) for i in range(7)) == list(range(1, 8))

    def test_log_antilog(self, gf4):
        for a in range(1, 4):
            assert gf4.antilog(gf4.log(a)) == a

    def test_coefficients(self, gf8):
        assert gf8.coeffs(6) == [0, 1, 1]
        assert gf8.from_coeffs([0, 1, 1]) == 6

    def test_arith_dispatch(self, gf3):
        assert arith(gf3, "add", 1, 2) == 0
        assert arith(gf3, "sub", 0, 1) == 2
        assert arith(gf3, "inv", 2) == 2
        assert arith(gf3, "pow", 2, 3) == 2
        with pytest.raises(ParameterOutOfRange):
            arith(gf3, "mul", 3, 1)
        with pytest.raises(ParameterOutOfRange):
            arith(gf3, "frobnicate", 1, 1)

    def test_elements_order(self, gf4):
        assert elements(gf4) == [0, 1, 2, 3]


@pytest.mark.parametrize("q,poly", [(4, "x^2 + x + 1"), (8, "x^3 + x + 1"), (9, None), (16, None), (25, None)])
def test_tables_agree_with_galois(q, poly):
    f = field_from_order(q)
    GF = galois.GF(q, irreducible_poly=poly) if poly else galois.GF(q, irreducible_poly=galois.Poly(list(reversed(f.modulus)), field=galois.GF(f.p)))
    for a in range(q):
        for b in range(q):
            assert f.add(a, b) == int(GF(a) + GF(b))
            assert f.mul(a, b) == int(GF(a) * GF(b))
        if a:
            assert f.inv(a) == int(GF(a) ** -1)


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9]), st.data())
def test_field_axioms(q, data):
    f = field_from_order(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert f.add(a, f.add(b, c)) == f.add(f.add(a, b), c)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.sub(f.add(a, b), b) == a
    if b:
        assert f.mul(f.div(a, b), b) == a
