"""
Rank-metric codes: rank distance, MRD verification, Gabidulin and
matrix-field constructions, and the bridge between (m,2,1) MRD codes and
complete mappings / orthomorphisms.

Vectors of GF(q)^m are identified with GF(q^m) through the polynomial
basis 1, a, ..., a^{m-1} of the default modulus; row-vector convention
throughout (x -> xM).
"""

from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from itertools import combinations, product
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple
import logging

from src.algebra.counting import SubspaceIterator
from src.algebra.gf import FieldSpec, field_make
from src.algebra.matrix import (
    Mat,
    Vector,
    check_enumeration,
    full_rank_matrices,
    is_full_rank,
    matadd,
    matmul,
    matsub,
    rank,
    scale,
    transpose,
    vec_from_index,
    vec_index,
    vec_matmul,
)
from src.config import get_config
from src.errors import (
    CodeTooSmall,
    FieldMismatch,
    InternalConsistencyError,
    NotFullRank,
    NotRepresentable,
    ParameterOutOfRange,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)


class MatrixCode:
    """A finite set of distinct, equal-shape matrices kept in canonical order."""

    def __init__(self, codewords: Iterable[Mat]):
        words = list(codewords)
        if not words:
            raise CodeTooSmall("a code needs at least one codeword")
        first = words[0]
        for X in words:
            if X.shape != first.shape:
                raise ShapeMismatch(f"codeword shapes {first.shape} and {X.shape} differ")
            if X.field != first.field:
                raise FieldMismatch(f"codeword fields {first.field!r} and {X.field!r} differ")
        unique = sorted(set(words))
        if len(unique) != len(words):
            raise ParameterOutOfRange("codewords must be distinct")
        self.field: FieldSpec = first.field
        self.m = first.m
        self.n = first.n
        self.codewords: Tuple[Mat, ...] = tuple(unique)

    def __len__(self) -> int:
        return len(self.codewords)

    def __iter__(self) -> Iterator[Mat]:
        return iter(self.codewords)

    def __contains__(self, X: Mat) -> bool:
        return X in self._members

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MatrixCode) and self.codewords == other.codewords

    def __hash__(self) -> int:
        return hash(self.codewords)

    def __repr__(self) -> str:
        return f"MatrixCode({self.m}x{self.n} over {self.field!r}, size={len(self)})"

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.codewords)

    @property
    def size(self) -> int:
        return len(self.codewords)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(X.index for X in self.codewords)

    @cached_property
    def is_linear(self) -> bool:
        """Closed under addition and scalar multiplication (verified)."""
        members = self._members
        if Mat.zeros(self.field, self.m, self.n) not in members:
            return False
        for X, Y in combinations(self.codewords, 2):
            if matadd(X, Y) not in members:
                return False
        for c in range(2, self.field.q):
            if any(scale(c, X) not in members for X in self.codewords):
                return False
        return True

    @cached_property
    def rank_distance(self) -> int:
        return rank_distance(self)

    def transpose(self) -> "MatrixCode":
        return MatrixCode(transpose(X) for X in self.codewords)

    def translate(self, B: Mat) -> "MatrixCode":
        return MatrixCode(matadd(X, B) for X in self.codewords)


def rank_distance_witness(C: MatrixCode) -> Tuple[int, Tuple[Mat, Mat]]:
    """Minimum rank of X - Y and the canonically first pair attaining it."""
    if len(C) < 2:
        raise CodeTooSmall("rank distance needs at least two codewords")
    best, pair = None, None
    for X, Y in combinations(C.codewords, 2):
        r = rank(matsub(X, Y))
        if best is None or r < best:
            best, pair = r, (X, Y)
            if r == 1:
                break
    return best, pair


def rank_distance(C: MatrixCode) -> int:
    """
    Rank distance d_R(C).

    Pairwise scan; for linear codes the minimum nonzero codeword rank is
    computed as well and the two must agree.
    """
    d, _ = rank_distance_witness(C)
    if C.is_linear:
        d_lin = min(rank(X) for X in C.codewords if not X.is_zero())
        if d_lin != d:
            raise InternalConsistencyError(f"pairwise distance {d} != minimum weight {d_lin} on a linear code")
    return d


def singleton_bound(m: int, n: int, q: int, d: int) -> int:
    """Largest possible size of an m x n code with rank distance d."""
    return q ** (max(m, n) * (min(m, n) - d + 1))


@dataclass
class MrdVerdict:
    """Outcome of ``is_mrd``; truthy iff the code is MRD."""

    is_mrd: bool
    size: int
    expected_size: int
    rank_distance: Optional[int]
    expected_distance: int
    witness: Optional[Tuple[Mat, Mat]] = None
    criteria: Dict[str, Optional[bool]] = dataclass_field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.is_mrd


def _surjectivity_criterion(C: MatrixCode, k: int) -> bool:
    """
    |C| = q^{k max(m,n)} and B·C = F^{k x n} for every full-rank k x m B
    (m <= n), resp. C·B = F^{m x k} for every full-rank n x k B (m >= n).

    Only the row space of B (column space for m >= n) matters, so one
    canonical basis per subspace is tested.
    """
    f, m, n, q = C.field, C.m, C.n, C.field.q
    if len(C) != q ** (k * max(m, n)):
        return False
    if m <= n:
        for basis in SubspaceIterator(m, k, f):
            B = Mat.from_rows(f, basis)
            if len({matmul(B, X) for X in C.codewords}) != q ** (k * n):
                return False
    else:
        for basis in SubspaceIterator(n, k, f):
            B = Mat.from_columns(f, basis)
            if len({matmul(X, B) for X in C.codewords}) != q ** (m * k):
                return False
    return True


def is_mrd(C: MatrixCode, k: int) -> MrdVerdict:
    """
    Decide whether C is an (m,n,k) MRD code.

    Args:
        C: Code
        k: 1 <= k <= min(m, n)

    Returns:
        MrdVerdict with a witness pair of too-small rank distance on failure
    """
    m, n, q = C.m, C.n, C.field.q
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    expected_size = q ** (k * max(m, n))
    expected_distance = min(m, n) - k + 1

    distance, witness = None, None
    if len(C) >= 2:
        distance, pair = rank_distance_witness(C)
        if distance < expected_distance:
            witness = pair
    size_distance = len(C) == expected_size and distance == expected_distance

    criteria: Dict[str, Optional[bool]] = {"size_distance": size_distance, "surjectivity": None}
    if len(C) <= get_config().mrd_cross_check_limit:
        surjective = _surjectivity_criterion(C, k)
        criteria["surjectivity"] = surjective
        if surjective != size_distance:
            raise InternalConsistencyError(
                f"MRD criteria disagree on {C!r}: size+distance={size_distance}, surjectivity={surjective}"
            )
    else:
        logger.warning(f"Skipping surjectivity cross-check for code of size {len(C)}")

    return MrdVerdict(
        is_mrd=size_distance,
        size=len(C),
        expected_size=expected_size,
        rank_distance=distance,
        expected_distance=expected_distance,
        witness=witness,
        criteria=criteria,
    )


def _require_prime_base(field: FieldSpec, what: str):
    if not field.is_prime_field:
        raise ParameterOutOfRange(f"{what} needs a prime base field, got {field!r}")


def extension_field(field: FieldSpec, m: int) -> FieldSpec:
    """GF(p^m) with the default modulus, viewed over the prime field ``field``."""
    _require_prime_base(field, "extension field")
    return field_make(field.p, m)


def gabidulin(m: int, n: int, k: int, field: FieldSpec, cap: Optional[int] = None) -> MatrixCode:
    """
    Gabidulin (m,n,k) MRD code over a prime field.

    For m >= n every q-polynomial L(x) = sum_{i<k} a_i x^{q^i} over GF(q^m)
    is written as the m x m matrix with row i = coordinates of L(a^i), and
    the last m - n columns are deleted. For m < n the (n,m,k) code is
    built and transposed.

    Args:
        m: Rows
        n: Columns
        k: 1 <= k <= min(m, n)
        field: Prime base field GF(q)
        cap: Enumeration guard

    Returns:
        MatrixCode of size q^{k max(m,n)}
    """
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    if m < n:
        return gabidulin(n, m, k, field, cap).transpose()
    _require_prime_base(field, "Gabidulin construction")
    q = field.q
    check_enumeration(q ** (k * m), cap, f"Gabidulin({m},{n},{k}) over GF({q})")

    ext = extension_field(field, m)
    basis = [q**i for i in range(m)]
    # frob[i][b] = (a^b)^(q^i)
    frob = [[ext.pow(basis[b], q**i) for b in range(m)] for i in range(k)]

    words = []
    for coeffs in product(range(ext.q), repeat=k):
        entries = []
        for b in range(m):
            value = 0
            for i, a in enumerate(coeffs):
                if a:
                    value = ext.add(value, ext.mul(a, frob[i][b]))
            entries.extend(ext.coeffs(value)[:n])
        words.append(Mat(field, m, n, tuple(entries)))
    code = MatrixCode(words)
    logger.debug(f"Built Gabidulin({m},{n},{k}) over GF({q}): {len(code)} codewords")
    return code


def companion_matrix(coeffs: Sequence[int], field: FieldSpec) -> Mat:
    """
    Companion matrix of a monic polynomial (constant-first coefficients)
    under the row-vector convention: x^i -> x^{i+1}.
    """
    d = len(coeffs) - 1
    rows = [[1 if j == i + 1 else 0 for j in range(d)] for i in range(d - 1)]
    rows.append([field.neg(c) for c in coeffs[:d]])
    return Mat.from_rows(field, rows)


class MatrixField:
    """
    The field {0, I, K, K^2, ..., K^{q^m-2}} of m x m matrices, K the matrix
    of multiplication by a primitive element of GF(q^m).
    """

    def __init__(self, m: int, field: FieldSpec):
        _require_prime_base(field, "matrix field")
        self.m = m
        self.field = field
        self.ext = extension_field(field, m)
        q = field.q
        g = self.ext.primitive_elem
        self.K = Mat.from_rows(field, [self.ext.coeffs(self.ext.mul(g, q**i)) for i in range(m)])

        powers = [Mat.identity(field, m)]
        for _ in range(self.ext.q - 2):
            powers.append(matmul(powers[-1], self.K))
        self.elements: List[Mat] = [Mat.zeros(field, m, m)] + powers
        self._members = frozenset(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, X: Mat) -> bool:
        return X in self._members

    def verify(self) -> bool:
        """Closure under + and ·, q^m distinct elements, every nonzero element invertible."""
        members = self._members
        if len(members) != self.field.q ** self.m:
            raise InternalConsistencyError("matrix field elements are not distinct")
        for X in self.elements:
            for Y in self.elements:
                if matadd(X, Y) not in members or matmul(X, Y) not in members:
                    raise InternalConsistencyError("matrix field is not closed")
        if not all(is_full_rank(X) for X in self.elements[1:]):
            raise InternalConsistencyError("matrix field has a singular nonzero element")
        return True


def matrix_field(m: int, field: FieldSpec) -> MatrixField:
    return MatrixField(m, field)


def mrd_from_field(F: MatrixField, A: Mat) -> MatrixCode:
    """The (m,n,1) MRD code F·A = {XA : X in F} for a full-rank m x n A, m >= n."""
    if A.m != F.m:
        raise ShapeMismatch(f"A must have {F.m} rows, got {A.m}")
    if A.m < A.n:
        raise ParameterOutOfRange(f"need m >= n, got {A.m}x{A.n}")
    if not is_full_rank(A):
        raise NotFullRank("A must have full rank")
    code = MatrixCode(matmul(X, A) for X in F.elements)
    if not is_mrd(code, 1):
        raise InternalConsistencyError("F·A is not MRD")
    return code


def field_code_orbit_count(m: int, n: int, field: FieldSpec) -> int:
    """Number of distinct codes F·A over all full-rank m x n A (brute force)."""
    F = MatrixField(m, field)
    codes = set()
    for A in full_rank_matrices(m, n, field):
        codes.add(frozenset(matmul(X, A).index for X in F.elements))
    return len(codes)


def binary_2x2_mrd_codes() -> Tuple[MatrixCode, MatrixCode]:
    """The two linear (2,2,1) MRD codes of F_2^{2x2}; every other one is a coset."""
    f = field_make(2)
    A = MatrixCode(Mat.from_rows(f, rows) for rows in (
        [[0, 0], [0, 0]], [[1, 0], [0, 1]], [[1, 1], [1, 0]], [[0, 1], [1, 1]],
    ))
    A_prime = MatrixCode(Mat.from_rows(f, rows) for rows in (
        [[0, 0], [0, 0]], [[0, 1], [1, 0]], [[1, 0], [1, 1]], [[1, 1], [0, 1]],
    ))
    return A, A_prime


# Complete mappings and orthomorphisms

@dataclass(frozen=True)
class VectorMap:
    """A map f: GF(q)^m -> GF(q)^m as a table over canonical vector indices."""

    field: FieldSpec
    m: int
    table: Tuple[int, ...]

    def __post_init__(self):
        size = self.field.q ** self.m
        if len(self.table) != size or any(not 0 <= y < size for y in self.table):
            raise ParameterOutOfRange("table does not describe a map on GF(q)^m")

    def __call__(self, x: Sequence[int]) -> Vector:
        q = self.field.q
        return vec_from_index(self.table[vec_index(x, q)], self.m, q)

    def vectors(self) -> List[Vector]:
        q = self.field.q
        return [vec_from_index(i, self.m, q) for i in range(q**self.m)]

    @classmethod
    def from_function(cls, field: FieldSpec, m: int, fn: Callable[[Vector], Sequence[int]]) -> "VectorMap":
        q = field.q
        return cls(field, m, tuple(vec_index(fn(vec_from_index(i, m, q)), q) for i in range(q**m)))

    @classmethod
    def linear(cls, M: Mat) -> "VectorMap":
        """x -> xM."""
        return cls.from_function(M.field, M.m, lambda x: vec_matmul(x, M))

    @classmethod
    def identity(cls, field: FieldSpec, m: int) -> "VectorMap":
        return cls(field, m, tuple(range(field.q**m)))


def _combine(f: VectorMap, lam: int) -> List[int]:
    """Index table of x -> f(x) - lam·x."""
    F, q = f.field, f.field.q
    out = []
    for i, x in enumerate(f.vectors()):
        y = vec_from_index(f.table[i], f.m, q)
        out.append(vec_index([F.sub(b, F.mul(lam, a)) for a, b in zip(x, y)], q))
    return out


def _is_bijective(table: Sequence[int]) -> bool:
    return len(set(table)) == len(table)


def is_complete_mapping(f: VectorMap) -> bool:
    """f and x -> f(x) + x are both bijections."""
    return _is_bijective(f.table) and _is_bijective(_combine(f, f.field.neg(1)))


def is_orthomorphism(f: VectorMap) -> bool:
    """f and x -> f(x) - x are both bijections."""
    return _is_bijective(f.table) and _is_bijective(_combine(f, 1))


def is_mrd_map(f: VectorMap) -> bool:
    """{(x | f(x))} is MRD iff x -> f(x) - lam·x is bijective for every lam in GF(q)."""
    return all(_is_bijective(_combine(f, lam)) for lam in range(f.field.q))


def is_affine_map(f: VectorMap) -> bool:
    """x -> f(x) - f(0) is GF(q)-linear."""
    F, q, m = f.field, f.field.q, f.m
    f0 = f.table[0]
    shifted = [vec_index([F.sub(a, b) for a, b in zip(vec_from_index(y, m, q), vec_from_index(f0, m, q))], q)
               for y in f.table]
    vectors = f.vectors()
    for i, x in enumerate(vectors):
        for j, y in enumerate(vectors):
            s = vec_index([F.add(a, b) for a, b in zip(x, y)], q)
            lhs = vec_from_index(shifted[s], m, q)
            rhs = [F.add(a, b) for a, b in zip(vec_from_index(shifted[i], m, q), vec_from_index(shifted[j], m, q))]
            if list(lhs) != rhs:
                return False
    for c in range(2, q):
        for i, x in enumerate(vectors):
            cx = vec_index([F.mul(c, a) for a in x], q)
            if list(vec_from_index(shifted[cx], m, q)) != [F.mul(c, a) for a in vec_from_index(shifted[i], m, q)]:
                return False
    return True


def map_to_mrd(f: VectorMap) -> MatrixCode:
    """The code {(x | f(x))} of m x 2 matrices."""
    return MatrixCode(Mat.from_columns(f.field, [x, f(x)]) for x in f.vectors())


def mrd_to_map(C: MatrixCode) -> VectorMap:
    """
    Read an (m,2,1) MRD code as the graph of a map.

    Raises:
        NotRepresentable: first columns do not run through GF(q)^m exactly once
    """
    if C.n != 2:
        raise NotRepresentable(f"need m x 2 codewords, got {C.m}x{C.n}")
    q, m = C.field.q, C.m
    table = [None] * (q**m)
    for X in C.codewords:
        i = vec_index(X.col(0), q)
        if table[i] is not None:
            raise NotRepresentable("first columns repeat")
        table[i] = vec_index(X.col(1), q)
    if any(y is None for y in table):
        raise NotRepresentable("first columns miss a vector")
    return VectorMap(C.field, m, tuple(table))


def iter_complete_mappings(m: int, field: FieldSpec) -> Iterator[VectorMap]:
    """Backtracking over complete mappings of GF(q)^m in canonical order."""
    q = field.q
    size = q**m
    vectors = [vec_from_index(i, m, q) for i in range(size)]
    plus = [[vec_index([field.add(a, b) for a, b in zip(x, y)], q) for y in vectors] for x in vectors]
    table = [0] * size
    used_f = [False] * size
    used_sum = [False] * size

    def extend(x: int) -> Iterator[VectorMap]:
        if x == size:
            yield VectorMap(field, m, tuple(table))
            return
        for y in range(size):
            s = plus[x][y]
            if used_f[y] or used_sum[s]:
                continue
            table[x] = y
            used_f[y] = used_sum[s] = True
            yield from extend(x + 1)
            used_f[y] = used_sum[s] = False

    yield from extend(0)


def find_complete_mapping(m: int, field: FieldSpec, nonaffine: bool = True) -> VectorMap:
    """
    First complete mapping of GF(q)^m in backtracking order, optionally
    skipping affine ones (which only give cosets of linear MRD codes).
    """
    for f in iter_complete_mappings(m, field):
        if not nonaffine or not is_affine_map(f):
            logger.info(f"Found {'nonaffine ' if nonaffine else ''}complete mapping of GF({field.q})^{m}")
            return f
    raise NotRepresentable(f"no {'nonaffine ' if nonaffine else ''}complete mapping of GF({field.q})^{m}")
