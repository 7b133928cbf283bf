"""
The matrix affine geometries RAG(m,n,q) and LAG(m,n,q).

Points are the matrices of GF(q)^{m x n}. A right r-flat is a coset
rep + {X : colspace X <= V} with V an r-dimensional subspace of GF(q)^m;
left flats use row spaces and subspaces of GF(q)^n and are built as
transposed right flats of the (n, m) geometry. Flats are stored as a
direction (canonical RREF basis) plus the canonical minimum point; point
sets and flats are bitmasks over canonical point indices.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple
import logging

from src.algebra.counting import SubspaceIterator, gaussian_binomial
from src.algebra.gf import FieldSpec, field_make
from src.algebra.matrix import (
    Mat,
    Vector,
    check_enumeration,
    enumerate_matrices,
    matadd,
    matmul,
    matsub,
    rank,
    row_space,
    rref_rows,
    span,
    transpose,
)
from src.codes.rank_metric import MatrixCode, binary_2x2_mrd_codes, extension_field
from src.errors import (
    BasisMismatch,
    EnumerationTooLarge,
    EqualPoints,
    InternalConsistencyError,
    NotADesign,
    ParameterOutOfRange,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

Subspace = Tuple[Vector, ...]


def _pivots(basis: Subspace) -> List[int]:
    return [next(i for i, x in enumerate(v) if x) for v in basis]


def _reduce(v: Sequence[int], basis: Subspace, pivots: Sequence[int], field: FieldSpec) -> Vector:
    """Lexicographically smallest element of v + span(basis) (basis in RREF)."""
    out = list(v)
    for b, p in zip(basis, pivots):
        c = out[p]
        if c:
            out = [field.sub(x, field.mul(c, y)) for x, y in zip(out, b)]
    return tuple(out)


def _canonical_right_rep(X: Mat, direction: Subspace) -> Mat:
    piv = _pivots(direction)
    cols = [_reduce(c, direction, piv, X.field) for c in X.columns()]
    return Mat.from_columns(X.field, cols) if X.n else X


def _canonical_left_rep(X: Mat, direction: Subspace) -> Mat:
    piv = _pivots(direction)
    return Mat.from_rows(X.field, [_reduce(r, direction, piv, X.field) for r in X.rows()]) if X.m else X


@dataclass(frozen=True)
class FlatDescriptor:
    """An r-flat: canonical minimum point plus direction subspace."""

    side: str
    rep: Mat
    direction: Subspace

    @property
    def r(self) -> int:
        return len(self.direction)

    @property
    def size(self) -> int:
        q = self.rep.field.q
        return q ** (self.r * (self.rep.n if self.side == "right" else self.rep.m))

    def through_zero(self) -> bool:
        return self.rep.is_zero()

    def contains(self, X: Mat) -> bool:
        if X.shape != self.rep.shape:
            return False
        canon = _canonical_right_rep if self.side == "right" else _canonical_left_rep
        return canon(X, self.direction) == self.rep

    def points(self) -> List[Mat]:
        """Points in canonical order."""
        f, m, n = self.rep.field, self.rep.m, self.rep.n
        if not self.direction:
            return [self.rep]
        if self.side == "right":
            B = Mat.from_columns(f, self.direction)
            members = (matmul(B, Y) for Y in enumerate_matrices(self.r, n, f))
        else:
            B = Mat.from_rows(f, self.direction)
            members = (matmul(Y, B) for Y in enumerate_matrices(m, self.r, f))
        return sorted(matadd(self.rep, U) for U in members)

    def to_dict(self) -> dict:
        return {"side": self.side, "rep": self.rep.to_lists(), "direction": [list(v) for v in self.direction]}


class PointSet:
    """Distinct points of GF(q)^{m x n} in canonical order."""

    def __init__(self, points: Iterable[Mat]):
        pts = list(points)
        if not pts:
            raise ParameterOutOfRange("a point set needs at least one point")
        first = pts[0]
        if any(X.shape != first.shape or X.field != first.field for X in pts):
            raise ShapeMismatch("points must share shape and field")
        unique = sorted(set(pts))
        if len(unique) != len(pts):
            raise ParameterOutOfRange("points must be distinct")
        self.field: FieldSpec = first.field
        self.m = first.m
        self.n = first.n
        self.points: Tuple[Mat, ...] = tuple(unique)
        self._members = frozenset(unique)

    @classmethod
    def from_indices(cls, field: FieldSpec, m: int, n: int, indices: Iterable[int]) -> "PointSet":
        return cls(Mat.from_index(field, m, n, i) for i in indices)

    @classmethod
    def from_mask(cls, field: FieldSpec, m: int, n: int, mask: int) -> "PointSet":
        return cls.from_indices(field, m, n, (i for i in range(mask.bit_length()) if mask >> i & 1))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, X: Mat) -> bool:
        return X in self._members

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PointSet) and self.points == other.points

    def __repr__(self) -> str:
        return f"PointSet({self.m}x{self.n} over {self.field!r}, size={len(self)})"

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(X.index for X in self.points)

    @property
    def mask(self) -> int:
        mask = 0
        for X in self.points:
            mask |= 1 << X.index
        return mask


def _check_side(side: str):
    if side not in ("left", "right"):
        raise ParameterOutOfRange(f"side must be 'left' or 'right', got {side!r}")


def flat_count(side: str, m: int, n: int, q: int, r: int) -> int:
    """[m r]_q q^{(m-r)n} right r-flats; left flats swap m and n."""
    a, b = (m, n) if side == "right" else (n, m)
    return gaussian_binomial(a, r, q) * q ** ((a - r) * b)


def _right_flats(m: int, n: int, field: FieldSpec, r: int) -> Tuple[List[FlatDescriptor], List[FlatDescriptor]]:
    through_zero, others = [], []
    for V in SubspaceIterator(m, r, field):
        piv = set(_pivots(V))
        free = [i for i in range(m) if i not in piv]
        # canonical reps: columns vanish on the pivot rows of V
        for values in product(range(field.q), repeat=len(free) * n):
            entries = [0] * (m * n)
            for (i, j), x in zip(product(free, range(n)), values):
                entries[i * n + j] = x
            flat = FlatDescriptor("right", Mat(field, m, n, tuple(entries)), V)
            (through_zero if flat.through_zero() else others).append(flat)
    return through_zero, others


def enumerate_flats(
    side: str,
    m: int,
    n: int,
    field: FieldSpec,
    r: int,
    cap: Optional[int] = None
) -> Iterator[FlatDescriptor]:
    """
    Every r-flat exactly once: flats through 0 first (direction order),
    then the others ordered by (rep, direction).
    """
    _check_side(side)
    bound = m if side == "right" else n
    if not 0 <= r <= bound:
        raise ParameterOutOfRange(f"r={r} outside 0..{bound}")
    check_enumeration(flat_count(side, m, n, field.q, r), cap, f"{r}-flats of {side} geometry ({m},{n})")

    if side == "right":
        zero, others = _right_flats(m, n, field, r)
    else:
        t_zero, t_others = _right_flats(n, m, field, r)
        zero = [FlatDescriptor("left", transpose(f.rep), f.direction) for f in t_zero]
        others = [
            FlatDescriptor("left", _canonical_left_rep(transpose(f.rep), f.direction), f.direction)
            for f in t_others
        ]
    others.sort(key=lambda f: (f.rep.entries, f.direction))
    yield from zero
    yield from others


def _point_add(field: FieldSpec, m: int, n: int) -> Callable[[int, int], int]:
    if field.p == 2:
        return lambda i, j: i ^ j
    return lambda i, j: matadd(Mat.from_index(field, m, n, i), Mat.from_index(field, m, n, j)).index


class FlatSystem:
    """
    All r-flats of one geometry as bitmasks over canonical point indices,
    with parallel classes (flats sharing a direction) and point incidence.
    """

    def __init__(self, side: str, m: int, n: int, field: FieldSpec, r: int, cap: Optional[int] = None):
        self.side = side
        self.m = m
        self.n = n
        self.field = field
        self.r = r
        self.num_points = field.q ** (m * n)
        check_enumeration(self.num_points, cap, f"points of ({m},{n}) geometry over GF({field.q})")
        self.flats: List[FlatDescriptor] = list(enumerate_flats(side, m, n, field, r, cap))

        add = _point_add(field, m, n)
        offsets: Dict[Subspace, List[int]] = {}
        self.masks: List[int] = []
        by_direction: Dict[Subspace, List[int]] = {}
        for idx, flat in enumerate(self.flats):
            if flat.direction not in offsets:
                zero = FlatDescriptor(side, Mat.zeros(field, m, n), flat.direction)
                offsets[flat.direction] = [X.index for X in zero.points()]
                by_direction[flat.direction] = []
            base = flat.rep.index
            mask = 0
            for u in offsets[flat.direction]:
                mask |= 1 << add(base, u)
            self.masks.append(mask)
            by_direction[flat.direction].append(idx)
        self.classes: List[List[int]] = list(by_direction.values())
        self.directions: List[Subspace] = list(by_direction)
        self.point_flats: List[List[int]] = [[] for _ in range(self.num_points)]
        for idx, mask in enumerate(self.masks):
            for p in _bits(mask):
                self.point_flats[p].append(idx)
        logger.debug(f"{side} geometry ({m},{n}) over GF({field.q}): {len(self.flats)} {r}-flats")

    def __len__(self) -> int:
        return len(self.flats)

    def first_unblocked(self, mask: int) -> Optional[int]:
        return next((i for i, fm in enumerate(self.masks) if not fm & mask), None)

    def histogram(self, mask: int) -> Dict[int, int]:
        counts = Counter((fm & mask).bit_count() for fm in self.masks)
        return dict(sorted(counts.items()))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@lru_cache(maxsize=64)
def flat_system(side: str, m: int, n: int, field: FieldSpec, r: int) -> FlatSystem:
    return FlatSystem(side, m, n, field, r)


# Geometry statistics

@dataclass
class GeometryStats:
    side: str
    m: int
    n: int
    q: int
    points: int
    flats: Dict[int, int]
    parallel_classes: Dict[int, int]
    flat_size: Dict[int, int]

    def to_dict(self) -> dict:
        payload = dict(self.__dict__)
        payload["lines"] = self.flats.get(1, 0)
        payload["planes"] = self.flats.get(2, 0)
        return payload


def geometry_stats(side: str, m: int, n: int, field: FieldSpec) -> GeometryStats:
    """Counts by closed form, cross-checked against enumeration when it fits the cap."""
    _check_side(side)
    q = field.q
    a, b = (m, n) if side == "right" else (n, m)
    flats, classes, sizes = {}, {}, {}
    for r in range(a + 1):
        flats[r] = flat_count(side, m, n, q, r)
        classes[r] = gaussian_binomial(a, r, q)
        sizes[r] = q ** (r * b)
    for r in (1, 2):
        if r <= a:
            try:
                counted = len(flat_system(side, m, n, field, r))
            except EnumerationTooLarge as e:
                logger.debug(f"Skipping enumeration cross-check for {r}-flats: {e}")
                continue
            if counted != flats[r]:
                raise InternalConsistencyError(f"{counted} enumerated {r}-flats, formula gives {flats[r]}")
    return GeometryStats(side, m, n, q, q ** (m * n), flats, classes, sizes)


def flats_through(X: Mat, r: int, side: str = "right") -> List[FlatDescriptor]:
    """All r-flats containing X, one per direction."""
    _check_side(side)
    ambient = X.m if side == "right" else X.n
    canon = _canonical_right_rep if side == "right" else _canonical_left_rep
    return [FlatDescriptor(side, canon(X, V), V) for V in SubspaceIterator(ambient, r, X.field)]


def flat_of(X: Mat, Y: Mat) -> FlatDescriptor:
    """Smallest right flat containing X and Y (dimension rank(X - Y))."""
    V = tuple(rref_rows(matsub(Y, X).columns(), X.field, X.m)[0])
    return FlatDescriptor("right", _canonical_right_rep(X, V), V)


def plane_of(X: Mat, Y: Mat) -> FlatDescriptor:
    """The unique plane through two points at rank distance 2."""
    flat = flat_of(X, Y)
    if flat.r != 2:
        raise ParameterOutOfRange(f"points span a {flat.r}-flat, not a plane")
    return flat


@dataclass
class Collinearity:
    rank: int
    same_line: bool
    same_plane_only: bool


def collinearity(A: Mat, B: Mat) -> Collinearity:
    """A and B share a unique line iff rank(A - B) = 1, a unique plane but no line iff it is 2."""
    if A.shape != B.shape:
        raise ShapeMismatch(f"{A.shape} vs {B.shape}")
    if A == B:
        raise EqualPoints("collinearity needs two distinct points")
    r = rank(matsub(A, B))
    return Collinearity(rank=r, same_line=r == 1, same_plane_only=r == 2)


def _difference_ranks(m: int, n: int, field: FieldSpec) -> List[int]:
    return [rank(X) for X in enumerate_matrices(m, n, field)]


def _difference_index(field: FieldSpec, m: int, n: int):
    if field.p == 2:
        return lambda i, j: i ^ j
    return lambda i, j: matsub(Mat.from_index(field, m, n, i), Mat.from_index(field, m, n, j)).index


def verify_triangle_lemma(m: int = 3, n: int = 2, field: Optional[FieldSpec] = None) -> dict:
    """
    For every pair x, y with rank(x - y) = 2 and every z collinear with both,
    z lies in the plane through x and y.
    """
    field = field or field_make(2)
    ranks = _difference_ranks(m, n, field)
    diff = _difference_index(field, m, n)
    size = len(ranks)
    planes = flat_system("right", m, n, field, 2)
    plane_lookup = {(f.rep, f.direction): mask for f, mask in zip(planes.flats, planes.masks)}

    pairs = triples = 0
    for x in range(size):
        for y in range(x + 1, size):
            if ranks[diff(x, y)] != 2:
                continue
            pairs += 1
            plane = flat_of(Mat.from_index(field, m, n, x), Mat.from_index(field, m, n, y))
            mask = plane_lookup[(plane.rep, plane.direction)]
            for z in range(size):
                if ranks[diff(z, x)] == 1 and ranks[diff(z, y)] == 1:
                    triples += 1
                    if not mask >> z & 1:
                        return {"holds": False, "pairs": pairs, "triples": triples,
                                "counterexample": [x, y, z]}
    return {"holds": True, "pairs": pairs, "triples": triples}


def verify_point_residue(m: int = 3, n: int = 2, field: Optional[FieldSpec] = None) -> dict:
    """Observed incidence numbers between points, lines and planes (each a set of values)."""
    field = field or field_make(2)
    lines = flat_system("right", m, n, field, 1)
    planes = flat_system("right", m, n, field, 2)
    return {
        "lines_per_point": sorted({len(fl) for fl in lines.point_flats}),
        "planes_per_point": sorted({len(fl) for fl in planes.point_flats}),
        "points_per_line": sorted({lm.bit_count() for lm in lines.masks}),
        "points_per_plane": sorted({pm.bit_count() for pm in planes.masks}),
        "planes_per_line": sorted({sum(1 for pm in planes.masks if lm & pm == lm) for lm in lines.masks}),
        "lines_per_plane": sorted({sum(1 for lm in lines.masks if lm & pm == lm) for pm in planes.masks}),
    }


def affine_plane_of_order_four() -> dict:
    """
    The 12 lines of RAG(2,2,GF(2)) plus the 8 binary (2,2,1) MRD codes
    (cosets of the two linear ones) form an affine plane of order 4.
    """
    f = field_make(2)
    lines = flat_system("right", 2, 2, f, 1)
    blocks = list(lines.masks)
    for code in binary_2x2_mrd_codes():
        for B in enumerate_matrices(2, 2, f):
            coset = PointSet(matadd(X, B) for X in code)
            if coset.mask not in blocks:
                blocks.append(coset.mask)
    every_pair_once = all(
        sum(1 for b in blocks if b >> x & 1 and b >> y & 1) == 1
        for x, y in combinations(range(16), 2)
    )
    return {
        "points": 16,
        "lines": len(blocks),
        "points_per_line": sorted({b.bit_count() for b in blocks}),
        "every_pair_once": every_pair_once,
    }


# Density and designs

@dataclass
class DenseVerdict:
    is_dense: bool
    k: int
    witness: Optional[FlatDescriptor] = None

    def __bool__(self) -> bool:
        return self.is_dense


def _dense_by_products(S: PointSet, k: int) -> bool:
    """M·S = GF(q)^{k x n} for every full-rank k x m M (one M per row space)."""
    f, m, n = S.field, S.m, S.n
    target = f.q ** (k * n)
    seen = set()
    for M in enumerate_matrices(k, m, f, "full_rank"):
        key = row_space(M)
        if key in seen:
            continue
        seen.add(key)
        if len({matmul(M, X) for X in S.points}) != target:
            return False
    return True


def is_k_dense(S: PointSet, k: int) -> DenseVerdict:
    """
    S is k-dense iff it meets every (m-k)-flat of RAG(m,n,q). The product
    definition is evaluated too and the two must agree.
    """
    m, n = S.m, S.n
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    system = flat_system("right", m, n, S.field, m - k)
    first = system.first_unblocked(S.mask)
    blocking = first is None
    if _dense_by_products(S, k) != blocking:
        raise InternalConsistencyError(f"density criteria disagree on {S!r} for k={k}")
    return DenseVerdict(blocking, k, None if blocking else system.flats[first])


def intersection_pattern(S: PointSet, r: int, side: str = "right") -> Dict[int, int]:
    """Histogram {|S ∩ F|: number of r-flats F}."""
    return flat_system(side, S.m, S.n, S.field, r).histogram(S.mask)


def is_design(S: PointSet, k: int) -> Tuple[bool, Optional[Fraction]]:
    """
    Whether S meets every right (m-k)-flat in the same number λ of points;
    λ must then be |S| q^{-kn}.
    """
    m, n, q = S.m, S.n, S.field.q
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    hist = intersection_pattern(S, m - k, "right")
    if len(hist) != 1:
        return False, None
    lam = Fraction(next(iter(hist)))
    if lam != Fraction(len(S), q ** (k * n)):
        raise InternalConsistencyError(f"design index {lam} != |S| q^(-kn) = {Fraction(len(S), q ** (k * n))}")
    return True, lam


def design_duality_check(S: PointSet, k: int) -> dict:
    """
    A k-design of index λ for right (m-k)-flats meets every left (n-k)-flat
    in λ q^{k(n-m)} points.
    """
    ok, lam = is_design(S, k)
    if not ok:
        raise NotADesign(f"{S!r} is not a {k}-design for right flats")
    m, n, q = S.m, S.n, S.field.q
    expected = lam * Fraction(q) ** (k * (n - m))
    hist = intersection_pattern(S, n - k, "left")
    holds = set(hist) == {expected}
    return {"holds": holds, "lambda": lam, "lambda_left": expected, "left_histogram": hist}


def dense_subspace_sweep(m: int, n: int, field: FieldSpec, k: int, dims: Sequence[int]) -> Dict[int, dict]:
    """
    For each GF(q)-subspace of GF(q)^{m x n} of the given dimensions, test
    k-density (as blocking) and, for the dense ones, the design property.
    """
    system = flat_system("right", m, n, field, m - k)
    out = {}
    for dim in dims:
        total = dense = designs = 0
        for basis in SubspaceIterator(m * n, dim, field):
            mask = 0
            for v in span(basis, field, m * n):
                mask |= 1 << Mat(field, m, n, v).index
            total += 1
            if system.first_unblocked(mask) is None:
                dense += 1
                if len(system.histogram(mask)) == 1:
                    designs += 1
        out[dim] = {"subspaces": total, "dense": dense, "dense_are_designs": designs == dense}
        logger.debug(f"dimension {dim}: {dense} of {total} subspaces are {k}-dense")
    return out


# Extension-field coordinates and the 22-point line-blocking set

def _check_ext(X_field: FieldSpec, m: int, ext: FieldSpec):
    if not X_field.is_prime_field or ext.p != X_field.p or ext.e != m:
        raise BasisMismatch(f"{ext!r} is not GF({X_field.q}^{m}) over {X_field!r}")


def ext_coords(X: Mat, ext: FieldSpec) -> Tuple[int, ...]:
    """Columns of X read as elements of GF(q^m) in the basis 1, a, ..., a^{m-1}."""
    _check_ext(X.field, X.m, ext)
    return tuple(ext.from_coeffs(list(c)) for c in X.columns())


def from_ext_coords(coords: Sequence[int], field: FieldSpec, ext: FieldSpec) -> Mat:
    """Inverse of ``ext_coords``."""
    m = ext.e
    _check_ext(field, m, ext)
    return Mat.from_columns(field, [ext.coeffs(c) for c in coords])


def line_code(i: int, ext: FieldSpec, field: FieldSpec) -> MatrixCode:
    """{(x, x a^i) : x in GF(q^m)} as m x 2 matrices."""
    g = ext.antilog(i)
    return MatrixCode(from_ext_coords((x, ext.mul(x, g)), field, ext) for x in range(ext.q))


def build_22set(ext: Optional[FieldSpec] = None) -> PointSet:
    """
    The union of the three (3,2,1) MRD codes {(x, x a^i)} for i = 1, 2, 4
    in GF(2)^{3x2}; 22 points blocking every line.
    """
    field = field_make(2)
    ext = ext or extension_field(field, 3)
    if ext.q != 8:
        raise BasisMismatch(f"the 22-point set lives over GF(8), got {ext!r}")
    points = set()
    for i in (1, 2, 4):
        points.update(line_code(i, ext, field).codewords)
    return PointSet(points)


def dense_six_set() -> PointSet:
    """Six points of GF(2)^{3x2} meeting every plane of RAG(3,2,GF(2))."""
    f = field_make(2)
    rows = [
        [[1, 0], [0, 1], [0, 0]],
        [[1, 1], [1, 0], [0, 0]],
        [[0, 1], [1, 1], [0, 0]],
        [[0, 0], [1, 0], [1, 0]],
        [[0, 1], [0, 0], [0, 1]],
        [[0, 0], [0, 0], [1, 1]],
    ]
    return PointSet(Mat.from_rows(f, r) for r in rows)


# Example: a 1-good 16-point subspace of GF(2)^{2x3} with no MRD subcode

def vertex_example_subspace() -> PointSet:
    """{A : a12 + a13 + a23 = a12 + a22 + a23 = 0} (1-based entries)."""
    f = field_make(2)

    def keep(A: Mat) -> bool:
        a = lambda i, j: A.at(i - 1, j - 1)
        return (a(1, 2) + a(1, 3) + a(2, 3)) % 2 == 0 and (a(1, 2) + a(2, 2) + a(2, 3)) % 2 == 0

    return PointSet(enumerate_matrices(2, 3, f, keep))


def vertex_example_lines() -> dict:
    """
    The three lines through 0 of RAG(2,3,GF(2)) and the nonzero point A_i
    where each meets the example subspace; A_1 + A_2 + A_3 must vanish.
    """
    f = field_make(2)
    S = vertex_example_subspace()
    lines = [fl for fl in flat_system("right", 2, 3, f, 1).flats if fl.through_zero()]
    meets = []
    for line in lines:
        common = [X for X in line.points() if X in S]
        meets.append({"line": line, "common": common})
    nonzero = [next(X for X in entry["common"] if not X.is_zero()) for entry in meets
               if len(entry["common"]) == 2]
    total = Mat.zeros(f, 2, 3)
    for X in nonzero:
        total = matadd(total, X)
    return {
        "lines": len(lines),
        "meet_in_two": all(len(entry["common"]) == 2 and Mat.zeros(f, 2, 3) in entry["common"] for entry in meets),
        "points": nonzero,
        "sum_is_zero": len(nonzero) == 3 and total.is_zero(),
    }
