"""
Matrices over GF(q) with exact linear algebra.

Canonical order: row-major lexicographic on element indices, i.e. the
base-q number whose most significant digit is entry (0,0). Every
enumeration, witness and golden file in the package follows it.
"""

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union
import logging

from src.algebra.gf import FieldSpec
from src.config import get_config
from src.errors import (
    EnumerationTooLarge,
    FieldMismatch,
    InternalConsistencyError,
    ParameterOutOfRange,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class Mat:
    """An m x n matrix of field element indices, stored row-major."""

    field: FieldSpec
    m: int
    n: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or len(self.entries) != self.m * self.n:
            raise ShapeMismatch(f"{len(self.entries)} entries do not fill a {self.m}x{self.n} matrix")
        q = self.field.q
        if any(not 0 <= x < q for x in self.entries):
            raise ParameterOutOfRange(f"matrix entry outside GF({q})")

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]]) -> "Mat":
        rows = [tuple(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise ShapeMismatch("ragged rows")
        return cls(field, m, n, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, field: FieldSpec, columns: Sequence[Sequence[int]]) -> "Mat":
        return transpose(cls.from_rows(field, columns))

    @classmethod
    def zeros(cls, field: FieldSpec, m: int, n: int) -> "Mat":
        return cls(field, m, n, (0,) * (m * n))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Mat":
        return cls(field, n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def from_index(cls, field: FieldSpec, m: int, n: int, index: int) -> "Mat":
        q = field.q
        entries = [0] * (m * n)
        for pos in range(m * n - 1, -1, -1):
            index, entries[pos] = divmod(index, q)
        return cls(field, m, n, tuple(entries))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.m, self.n)

    @property
    def index(self) -> int:
        """Position in the canonical order of GF(q)^{m x n}."""
        q = self.field.q
        idx = 0
        for x in self.entries:
            idx = idx * q + x
        return idx

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.n + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.n:(i + 1) * self.n]

    def col(self, j: int) -> Vector:
        return self.entries[j::self.n] if self.n else ()

    def rows(self) -> List[Vector]:
        return [self.row(i) for i in range(self.m)]

    def columns(self) -> List[Vector]:
        return [self.col(j) for j in range(self.n)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def to_lists(self) -> List[List[int]]:
        return [list(r) for r in self.rows()]

    def __lt__(self, other: "Mat") -> bool:
        return (self.m, self.n, self.entries) < (other.m, other.n, other.entries)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows())


def _check_same_field(A: Mat, B: Mat):
    if A.field is not B.field and A.field != B.field:
        raise FieldMismatch(f"{A.field!r} vs {B.field!r}")


def rref_rows(rows: Sequence[Sequence[int]], field: FieldSpec, ncols: int) -> Tuple[List[Vector], List[int]]:
    """
    Reduced row-echelon form of a list of rows.

    Pivots pick the lowest-index nonzero row in each column.

    Returns:
        (nonzero RREF rows, pivot columns)
    """
    work = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        piv = next((i for i in range(r, len(work)) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        lead = work[r][c]
        if lead != 1:
            inv = field.inv(lead)
            work[r] = [field.mul(inv, x) for x in work[r]]
        pivot_row = work[r]
        for i in range(len(work)):
            f = work[i][c]
            if i != r and f:
                work[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(work[i], pivot_row)]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in work[:r]], pivots


def rank(A: Mat) -> int:
    """Rank over GF(q) by Gaussian elimination."""
    _, pivots = rref_rows(A.rows(), A.field, A.n)
    r = len(pivots)
    if r > min(A.m, A.n):
        raise InternalConsistencyError(f"rank {r} exceeds min({A.m},{A.n})")
    return r


def is_full_rank(A: Mat) -> bool:
    return rank(A) == min(A.m, A.n)


def row_space(A: Mat) -> Tuple[Vector, ...]:
    """Canonical (RREF) basis of the row space."""
    basis, _ = rref_rows(A.rows(), A.field, A.n)
    return tuple(basis)


def column_space(A: Mat) -> Tuple[Vector, ...]:
    """Canonical (RREF) basis of the column space, as vectors of length m."""
    basis, _ = rref_rows(A.columns(), A.field, A.m)
    return tuple(basis)


def matmul(A: Mat, B: Mat) -> Mat:
    _check_same_field(A, B)
    if A.n != B.m:
        raise ShapeMismatch(f"cannot multiply {A.m}x{A.n} by {B.m}x{B.n}")
    f = A.field
    add, mul = f.add, f.mul
    bcols = B.columns()
    out = []
    for i in range(A.m):
        arow = A.row(i)
        for col in bcols:
            s = 0
            for x, y in zip(arow, col):
                if x and y:
                    s = add(s, mul(x, y))
            out.append(s)
    return Mat(f, A.m, B.n, tuple(out))


def matadd(A: Mat, B: Mat) -> Mat:
    _check_same_field(A, B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"cannot add {A.m}x{A.n} and {B.m}x{B.n}")
    add = A.field.add
    return Mat(A.field, A.m, A.n, tuple(add(x, y) for x, y in zip(A.entries, B.entries)))


def matsub(A: Mat, B: Mat) -> Mat:
    _check_same_field(A, B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"cannot subtract {B.m}x{B.n} from {A.m}x{A.n}")
    sub = A.field.sub
    return Mat(A.field, A.m, A.n, tuple(sub(x, y) for x, y in zip(A.entries, B.entries)))


def scale(c: int, A: Mat) -> Mat:
    mul = A.field.mul
    return Mat(A.field, A.m, A.n, tuple(mul(c, x) for x in A.entries))


def transpose(A: Mat) -> Mat:
    return Mat(A.field, A.n, A.m, tuple(x for col in A.columns() for x in col))


def kernel(A: Mat, side: str = "right") -> List[Vector]:
    """
    Basis of a null space.

    Args:
        A: Matrix
        side: "right" for {v in F^n : A v^T = 0}, "left" for {u in F^m : u A = 0}

    Returns:
        Canonical basis (possibly empty)
    """
    if side == "left":
        return kernel(transpose(A), "right")
    if side != "right":
        raise ParameterOutOfRange(f"side must be 'left' or 'right', got {side!r}")
    f = A.field
    reduced, pivots = rref_rows(A.rows(), f, A.n)
    free = [c for c in range(A.n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * A.n
        v[fc] = 1
        for row, pc in zip(reduced, pivots):
            v[pc] = f.neg(row[fc])
        basis.append(tuple(v))
    canonical, _ = rref_rows(basis, f, A.n)
    return canonical


def vec_matmul(u: Sequence[int], A: Mat) -> Vector:
    """Row vector times matrix."""
    if len(u) != A.m:
        raise ShapeMismatch(f"vector of length {len(u)} against {A.m}x{A.n}")
    f = A.field
    out = [0] * A.n
    for i, c in enumerate(u):
        if c:
            for j, x in enumerate(A.row(i)):
                if x:
                    out[j] = f.add(out[j], f.mul(c, x))
    return tuple(out)


def vec_index(v: Sequence[int], q: int) -> int:
    idx = 0
    for x in v:
        idx = idx * q + x
    return idx


def vec_from_index(index: int, length: int, q: int) -> Vector:
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        index, out[pos] = divmod(index, q)
    return tuple(out)


def span(basis: Sequence[Sequence[int]], field: FieldSpec, length: int) -> List[Vector]:
    """All vectors of the span of ``basis`` in canonical order."""
    vectors = set()
    for coeffs in product(range(field.q), repeat=len(basis)):
        v = [0] * length
        for c, b in zip(coeffs, basis):
            if c:
                for j, x in enumerate(b):
                    v[j] = field.add(v[j], field.mul(c, x))
        vectors.add(tuple(v))
    return sorted(vectors)


def full_rank_count(m: int, n: int, q: int) -> int:
    """Closed form |Omega(m,n,q)| = prod_{i<min}(q^max - q^i)."""
    lo, hi = min(m, n), max(m, n)
    count = 1
    for i in range(lo):
        count *= q**hi - q**i
    return count


def _resolve_cap(cap: Optional[int]) -> int:
    return get_config().enumeration_cap if cap is None else cap


def check_enumeration(states: int, cap: Optional[int] = None, what: str = "enumeration"):
    """Raise EnumerationTooLarge when ``states`` exceeds the cap."""
    limit = _resolve_cap(cap)
    if states > limit:
        raise EnumerationTooLarge(f"{what} needs {states} states, cap is {limit}", states=states, cap=limit)


def enumerate_matrices(
    m: int,
    n: int,
    field: FieldSpec,
    filter: Optional[Union[str, Callable[[Mat], bool]]] = None,
    cap: Optional[int] = None
) -> Iterator[Mat]:
    """
    Stream GF(q)^{m x n} in canonical order.

    Args:
        m: Rows
        n: Columns
        field: Field
        filter: Optional predicate, or "full_rank"
        cap: State guard (defaults to Config.enumeration_cap)

    Yields:
        Matrices passing the filter
    """
    check_enumeration(field.q ** (m * n), cap, f"GF({field.q})^{{{m}x{n}}}")
    if filter == "full_rank":
        predicate = is_full_rank
    elif filter is None or callable(filter):
        predicate = filter
    else:
        raise ParameterOutOfRange(f"unknown filter {filter!r}")
    for entries in product(range(field.q), repeat=m * n):
        A = Mat(field, m, n, entries)
        if predicate is None or predicate(A):
            yield A


def full_rank_matrices(m: int, n: int, field: FieldSpec, cap: Optional[int] = None) -> List[Mat]:
    """Omega(m,n,q) in canonical order."""
    return list(enumerate_matrices(m, n, field, "full_rank", cap))


def rank_census(m: int, n: int, field: FieldSpec, cap: Optional[int] = None) -> dict:
    """Brute-force {rank: count} over GF(q)^{m x n}."""
    census = {r: 0 for r in range(min(m, n) + 1)}
    for A in enumerate_matrices(m, n, field, cap=cap):
        census[rank(A)] += 1
    return census
