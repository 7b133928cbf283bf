"""
Left and right homogeneous weights on GF(q)^{m x n}.

Both weights depend only on rank. The left weight is
    w(X) = 1 - (-1)^r / prod_{i<r}(q^{m-i} - 1),  r = rank X,
and the right weight is the same expression with n in place of m.
"""

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from src.algebra.counting import SubspaceIterator, gaussian_binomial, rank_count
from src.algebra.gf import FieldSpec
from src.algebra.matrix import Mat, Vector, enumerate_matrices, matadd, matmul, rank
from src.codes.distributions import MatrixDistribution
from src.config import get_config
from src.errors import InternalConsistencyError, ParameterOutOfRange, ShapeMismatch

logger = logging.getLogger(__name__)

SIDES = ("left", "right")


def _check_side(side: str):
    if side not in SIDES:
        raise ParameterOutOfRange(f"side must be 'left' or 'right', got {side!r}")


class HomogeneousWeight:
    """Rank-class table of a homogeneous weight on GF(q)^{m x n}."""

    def __init__(self, side: str, m: int, n: int, field: FieldSpec):
        _check_side(side)
        self.side = side
        self.m = m
        self.n = n
        self.field = field
        q = field.q
        d = m if side == "left" else n
        self.values: Dict[int, Fraction] = {}
        for r in range(min(m, n) + 1):
            denominator = 1
            for i in range(r):
                denominator *= q ** (d - i) - 1
            self.values[r] = 1 - Fraction((-1) ** r, denominator)

    def value(self, r: int) -> Fraction:
        return self.values[r]

    def __call__(self, X: Mat) -> Fraction:
        if X.shape != (self.m, self.n):
            raise ShapeMismatch(f"expected {self.m}x{self.n}, got {X.m}x{X.n}")
        return self.values[rank(X)]

    def closed_total(self) -> int:
        """c_mn for the left weight; the right weight uses the transposed shape."""
        q = self.field.q
        a, b = (self.m, self.n) if self.side == "left" else (self.n, self.m)
        return q ** (a * b) - (-1) ** a * q ** (a * (a + 1) // 2) * gaussian_binomial(b - 1, a, q)

    def census_total(self) -> Fraction:
        q = self.field.q
        return sum(
            (rank_count(self.m, self.n, r, q) * w for r, w in self.values.items()),
            Fraction(0),
        )

    def brute_total(self, cap: Optional[int] = None) -> Fraction:
        return sum((self(X) for X in enumerate_matrices(self.m, self.n, self.field, cap=cap)), Fraction(0))


def hom_weight(side: str, m: int, n: int, field: FieldSpec, X: Mat) -> Fraction:
    return HomogeneousWeight(side, m, n, field)(X)


def total_weight(side: str, m: int, n: int, field: FieldSpec) -> Fraction:
    """
    Total weight sum_X w(X), by the closed form and by summation.

    The summation enumerates every matrix when that fits the enumeration
    cap and falls back to the rank census otherwise.
    """
    w = HomogeneousWeight(side, m, n, field)
    closed = Fraction(w.closed_total())
    if field.q ** (m * n) <= get_config().enumeration_cap:
        summed = w.brute_total()
    else:
        logger.warning(f"GF({field.q})^{{{m}x{n}}} exceeds the enumeration cap, summing over rank classes")
        summed = w.census_total()
    if closed != summed:
        raise InternalConsistencyError(f"{side} total weight: closed form {closed} != sum {summed}")
    return closed


def weight_table(side: str, m: int, n: int, field: FieldSpec, normalized: bool = True) -> List[Tuple[int, Fraction]]:
    """(rank, weight) rows for ranks 1..min(m, n)."""
    w = HomogeneousWeight(side, m, n, field)
    scale = 1 / total_weight(side, m, n, field) if normalized else Fraction(1)
    return [(r, w.value(r) * scale) for r in range(1, min(m, n) + 1)]


def normalized_distribution(side: str, m: int, n: int, field: FieldSpec) -> MatrixDistribution:
    """w / c as a distribution; the zero matrix has weight 0 and is not in the support."""
    w = HomogeneousWeight(side, m, n, field)
    gamma = 1 / total_weight(side, m, n, field)
    weights = {}
    for X in enumerate_matrices(m, n, field):
        value = w(X) * gamma
        if value:
            weights[X] = value
    return MatrixDistribution(weights)


# Submodules and cosets

def submodule(side: str, m: int, n: int, field: FieldSpec, basis: Sequence[Vector]) -> List[Mat]:
    """
    Elements of a submodule of GF(q)^{m x n} in canonical order.

    Right submodules {X : colspace X <= V} are indexed by V <= GF(q)^m,
    left submodules {X : rowspace X <= W} by W <= GF(q)^n.
    """
    _check_side(side)
    ambient = m if side == "right" else n
    if any(len(v) != ambient for v in basis):
        raise ShapeMismatch(f"{side} submodules are indexed by subspaces of GF(q)^{ambient}")
    if not basis:
        return [Mat.zeros(field, m, n)]
    r = len(basis)
    if side == "right":
        B = Mat.from_columns(field, basis)
        elements = {matmul(B, Y) for Y in enumerate_matrices(r, n, field)}
    else:
        B = Mat.from_rows(field, basis)
        elements = {matmul(Y, B) for Y in enumerate_matrices(m, r, field)}
    return sorted(elements)


def is_cyclic_submodule(side: str, m: int, n: int, dim: int) -> bool:
    """A left submodule indexed by W is cyclic iff dim W <= m (right: dim V <= n)."""
    _check_side(side)
    return dim <= (m if side == "left" else n)


@dataclass
class CosetSum:
    representative: Mat
    total: Fraction
    rank_census: Dict[int, int] = dataclass_field(default_factory=dict)


def coset_weight_sums(
    side: str,
    m: int,
    n: int,
    field: FieldSpec,
    basis: Sequence[Vector],
    weight_side: Optional[str] = None
) -> List[CosetSum]:
    """
    Normalized weight and rank census of every coset of a submodule.

    Args:
        side: Submodule side ("right": colspace in V, "left": rowspace in W)
        basis: Basis of V or W
        weight_side: Which homogeneous weight to sum (defaults to ``side``)

    Returns:
        One CosetSum per coset, representatives being canonical minima,
        the submodule itself first
    """
    weight_side = weight_side or side
    w = HomogeneousWeight(weight_side, m, n, field)
    gamma = 1 / total_weight(weight_side, m, n, field)
    U = submodule(side, m, n, field, basis)

    seen = set()
    sums = []
    for X in enumerate_matrices(m, n, field):
        if X in seen:
            continue
        coset = [matadd(X, Y) for Y in U]
        seen.update(coset)
        census = {r: 0 for r in range(min(m, n) + 1)}
        total = Fraction(0)
        for Z in coset:
            r = rank(Z)
            census[r] += 1
            total += w.value(r) * gamma
        sums.append(CosetSum(X, total, census))
    return sums


@dataclass
class H3Entry:
    dim: int
    basis: Tuple[Vector, ...]
    cyclic: bool
    size: int
    weight_sum: Fraction
    holds: bool


def h3_report(side: str, m: int, n: int, field: FieldSpec) -> List[H3Entry]:
    """
    Check sum_{X in U} w(X) = |U| over every nonzero submodule U of the
    given side under the weight of the same side.
    """
    _check_side(side)
    w = HomogeneousWeight(side, m, n, field)
    ambient = m if side == "right" else n
    report = []
    for dim in range(1, ambient + 1):
        for basis in SubspaceIterator(ambient, dim, field):
            U = submodule(side, m, n, field, basis)
            total = sum((w(X) for X in U), Fraction(0))
            report.append(H3Entry(
                dim=dim,
                basis=basis,
                cyclic=is_cyclic_submodule(side, m, n, dim),
                size=len(U),
                weight_sum=total,
                holds=total == len(U),
            ))
    return report
