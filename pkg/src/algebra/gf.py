"""
Finite fields GF(p^e) with table-driven arithmetic.

Elements are dense integer indices: the residue polynomial
c_0 + c_1 x + ... + c_{e-1} x^{e-1} is stored as sum(c_i * p**i), so
prime-field elements coincide with integers mod p. Index 0 is zero and
index 1 is one; ``elements(f)`` order is the canonical order used by
every enumeration in the package.
"""

from functools import lru_cache
from typing import List, Optional, Sequence, Tuple
import logging

import galois

from src.errors import (
    DivisionByZero,
    FieldTooLarge,
    NonPrimeCharacteristic,
    ParameterOutOfRange,
    ReducibleModulus,
)

logger = logging.getLogger(__name__)

FieldElement = int

MAX_FIELD_ORDER = 2**16
TABLE_LIMIT = 256

# Constant-first coefficient lists; GF(8) uses a^3 = a + 1.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
}


def _to_digits(index: int, p: int, e: int) -> List[int]:
    digits = []
    for _ in range(e):
        index, r = divmod(index, p)
        digits.append(r)
    return digits


def _from_digits(digits: Sequence[int], p: int) -> int:
    index = 0
    for c in reversed(digits):
        index = index * p + c
    return index


def _mulmod(a: List[int], b: List[int], modulus: Tuple[int, ...], p: int) -> List[int]:
    """Schoolbook product of residue polynomials, reduced by a monic modulus."""
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1 if e > 0 else 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, e - 1, -1):
        c = prod[deg]
        if c:
            for j in range(e + 1):
                prod[deg - e + j] = (prod[deg - e + j] - c * modulus[j]) % p
    return prod[:e]


class FieldSpec:
    """
    A validated finite field GF(p^e).

    Immutable after construction. Use ``field_make`` rather than calling
    the constructor directly.
    """

    def __init__(self, p: int, e: int, modulus: Tuple[int, ...]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = tuple(modulus)

        q = self.q
        self._neg = [_from_digits([(-c) % p for c in _to_digits(a, p, e)], p) for a in range(q)]
        if q <= TABLE_LIMIT and p != 2:
            digits = [_to_digits(a, p, e) for a in range(q)]
            self._add = [
                [_from_digits([(x + y) % p for x, y in zip(digits[a], digits[b])], p) for b in range(q)]
                for a in range(q)
            ]
        else:
            self._add = None

        self.primitive_elem = self._find_primitive()

        # exp is doubled so log[a] + log[b] never needs a reduction
        self._exp = [1] * (2 * (q - 1))
        self._log = [-1] * q
        g_digits = _to_digits(self.primitive_elem, p, e)
        current = [1] + [0] * (e - 1)
        for i in range(q - 1):
            idx = _from_digits(current, p)
            self._exp[i] = idx
            self._exp[i + q - 1] = idx
            self._log[idx] = i
            current = _mulmod(current, g_digits, self.modulus, p)

        if q <= TABLE_LIMIT:
            self._mul = [[self._mul_log(a, b) for b in range(q)] for a in range(q)]
        else:
            self._mul = None
        logger.debug(f"Built GF({q}) with modulus {self.modulus}, primitive element {self.primitive_elem}")

    def _find_primitive(self) -> int:
        q, p, e = self.q, self.p, self.e
        if q == 2:
            return 1
        for g in range(2, q):
            g_digits = _to_digits(g, p, e)
            current = list(g_digits)
            order = 1
            while current != [1] + [0] * (e - 1):
                current = _mulmod(current, g_digits, self.modulus, p)
                order += 1
                if order > q - 1:
                    break
            if order == q - 1:
                return g
        raise ReducibleModulus(f"no primitive element found for modulus {self.modulus}")

    def _mul_log(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    # Arithmetic kernel

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return self._add[a][b]
        p, e = self.p, self.e
        return _from_digits([(x + y) % p for x, y in zip(_to_digits(a, p, e), _to_digits(b, p, e))], p)

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        return self._mul_log(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def log(self, a: int) -> int:
        """Discrete logarithm to the base ``primitive_elem``."""
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log[a]

    def antilog(self, i: int) -> int:
        return self._exp[i % (self.q - 1)]

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise DivisionByZero("order of zero")
        k, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k

    # Representation helpers

    def coeffs(self, a: int) -> List[int]:
        """Coefficient vector over GF(p), constant term first."""
        return _to_digits(a, self.p, self.e)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.e or any(not 0 <= c < self.p for c in coeffs):
            raise ParameterOutOfRange(f"{list(coeffs)} is not a coefficient vector of GF({self.q})")
        return _from_digits(coeffs, self.p)

    def validate(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise ParameterOutOfRange(f"{a!r} is not an element of GF({self.q})")
        return a

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    @property
    def key(self) -> Tuple[int, int, Tuple[int, ...]]:
        return (self.p, self.e, self.modulus)

    def poly_string(self) -> str:
        """Comma-separated constant-first modulus, the ``--poly`` syntax."""
        return ",".join(str(c) for c in self.modulus)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.q})"
        return f"GF({self.q}, poly={self.poly_string()})"

    def __reduce__(self):
        return (field_make, (self.p, self.e, self.modulus))


def _default_modulus(p: int, e: int) -> Tuple[int, ...]:
    if e == 1:
        return (0, 1)
    if (p, e) in DEFAULT_MODULI:
        return DEFAULT_MODULI[(p, e)]
    poly = galois.primitive_poly(p, e)
    return tuple(int(c) for c in reversed(poly.coeffs))


@lru_cache(maxsize=None)
def _field_cached(p: int, e: int, modulus: Tuple[int, ...]) -> FieldSpec:
    if e > 1:
        poly = galois.Poly(list(reversed(modulus)), field=galois.GF(p))
        if not poly.is_irreducible():
            raise ReducibleModulus(f"modulus {list(modulus)} is reducible over GF({p})")
    return FieldSpec(p, e, modulus)


def field_make(p: int, e: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """
    Build and validate GF(p^e).

    Args:
        p: Prime characteristic
        e: Extension degree (>= 1)
        modulus: Monic degree-e polynomial over GF(p), constant term first.
            Defaults to the shipped table (x^2+x+1 for GF(4), x^3+x+1 for GF(8))
            and to the minimal primitive polynomial otherwise.

    Returns:
        FieldSpec
    """
    if not isinstance(p, int) or p < 2 or not galois.is_prime(p):
        raise NonPrimeCharacteristic(f"characteristic {p} is not prime", p=p)
    if not isinstance(e, int) or e < 1:
        raise ParameterOutOfRange(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_FIELD_ORDER:
        raise FieldTooLarge(f"GF({p}^{e}) exceeds the 2^16 guard", q=p**e)

    if modulus is None:
        modulus = _default_modulus(p, e)
    modulus = tuple(int(c) for c in modulus)
    if len(modulus) != e + 1 or modulus[-1] != 1 or any(not 0 <= c < p for c in modulus):
        raise ParameterOutOfRange(f"modulus {list(modulus)} is not a monic degree-{e} polynomial over GF({p})")

    return _field_cached(p, e, modulus)


def field_from_order(q: int, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """Build GF(q) from its order (CLI ``--q``)."""
    if q < 2:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    if q > MAX_FIELD_ORDER:
        raise FieldTooLarge(f"GF({q}) exceeds the 2^16 guard", q=q)
    primes, exponents = galois.factors(q)
    if len(primes) != 1:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    return field_make(int(primes[0]), int(exponents[0]), modulus)


def arith(f: FieldSpec, op: str, a: FieldElement, b: Optional[int] = None) -> FieldElement:
    """
    Dispatch one field operation.

    Args:
        f: Field
        op: One of add, sub, mul, inv, pow
        a: Left operand
        b: Right operand (an integer exponent for pow, unused for inv)

    Returns:
        Result element
    """
    f.validate(a)
    if op == "inv":
        return f.inv(a)
    if op == "pow":
        return f.pow(a, int(b))
    if op not in ("add", "sub", "mul"):
        raise ParameterOutOfRange(f"unknown field operation '{op}'")
    f.validate(b)
    return getattr(f, op)(a, b)


def elements(f: FieldSpec) -> List[FieldElement]:
    """All q elements in canonical index order."""
    return list(range(f.q))
