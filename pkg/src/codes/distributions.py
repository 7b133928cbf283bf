"""
Finitely supported random matrices with exact rational probabilities.

A ``MatrixDistribution`` maps matrices of one shape to positive
``Fraction`` weights summing to exactly 1. The k-goodness test is exact:
every full-rank k x m matrix M must push the distribution forward to the
uniform law on GF(q)^{k x n}.
"""

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from src.algebra.gf import FieldSpec
from src.algebra.matrix import (
    Mat,
    Vector,
    check_enumeration,
    enumerate_matrices,
    is_full_rank,
    matadd,
    matmul,
    rank,
    row_space,
    transpose,
    vec_matmul,
)
from src.codes.rank_metric import MatrixCode, gabidulin, is_mrd
from src.config import get_config
from src.errors import (
    EmptySupport,
    FieldMismatch,
    InternalConsistencyError,
    NotFullRank,
    NotFullRankSupport,
    ParameterOutOfRange,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

Weight = Union[Fraction, int, str]


class MatrixDistribution:
    """Immutable distribution on GF(q)^{m x n}; the support is exactly the stored keys."""

    def __init__(self, weights: Mapping[Mat, Weight]):
        if not weights:
            raise EmptySupport("a distribution needs a nonempty support")
        items = [(X, Fraction(w)) for X, w in weights.items()]
        first = items[0][0]
        total = Fraction(0)
        for X, w in items:
            if X.shape != first.shape:
                raise ShapeMismatch(f"support mixes shapes {first.shape} and {X.shape}")
            if X.field != first.field:
                raise FieldMismatch(f"support mixes {first.field!r} and {X.field!r}")
            if w <= 0:
                raise ParameterOutOfRange(f"weight {w} is not positive")
            total += w
        if total != 1:
            raise ParameterOutOfRange(f"weights sum to {total}, not 1")
        self.field: FieldSpec = first.field
        self.m = first.m
        self.n = first.n
        self._weights: Dict[Mat, Fraction] = dict(sorted(items, key=lambda item: item[0].entries))

    @property
    def weights(self) -> Mapping[Mat, Fraction]:
        return MappingProxyType(self._weights)

    @property
    def support(self) -> Tuple[Mat, ...]:
        return tuple(self._weights)

    def items(self):
        return self._weights.items()

    def __len__(self) -> int:
        return len(self._weights)

    def __getitem__(self, X: Mat) -> Fraction:
        return self._weights.get(X, Fraction(0))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MatrixDistribution) and self._weights == other._weights

    def __hash__(self) -> int:
        return hash(tuple(self._weights.items()))

    def __repr__(self) -> str:
        return f"MatrixDistribution({self.m}x{self.n} over {self.field!r}, support={len(self)})"

    def mass(self, predicate: Callable[[Mat], bool]) -> Fraction:
        return sum((w for X, w in self._weights.items() if predicate(X)), Fraction(0))

    def image(self, fn: Callable[[Mat], Hashable]) -> Dict[Hashable, Fraction]:
        """Pushforward weights under ``fn`` (keys need not be matrices)."""
        out: Dict[Hashable, Fraction] = {}
        for X, w in self._weights.items():
            key = fn(X)
            out[key] = out.get(key, Fraction(0)) + w
        return out

    def pushforward(self, fn: Callable[[Mat], Mat]) -> "MatrixDistribution":
        return MatrixDistribution(self.image(fn))


# Constructors

def uniform_over(S: Iterable[Mat]) -> MatrixDistribution:
    """Each element of S gets weight 1/|S|."""
    points = set(S)
    if not points:
        raise EmptySupport("cannot be uniform over an empty set")
    w = Fraction(1, len(points))
    return MatrixDistribution({X: w for X in points})


def point_mass(X: Mat) -> MatrixDistribution:
    return MatrixDistribution({X: 1})


def from_weights(field: FieldSpec, m: int, n: int, weights: Mapping[int, Weight]) -> MatrixDistribution:
    """Build from {canonical matrix index: weight}; zero weights are dropped."""
    return MatrixDistribution({
        Mat.from_index(field, m, n, idx): Fraction(w) for idx, w in weights.items() if Fraction(w) != 0
    })


def uniform_full_space(field: FieldSpec, m: int, n: int, cap: Optional[int] = None) -> MatrixDistribution:
    return uniform_over(enumerate_matrices(m, n, field, cap=cap))


def convex_combination(parts: Sequence[Tuple[Weight, MatrixDistribution]]) -> MatrixDistribution:
    """sum_i c_i D_i for rational c_i > 0 with sum 1."""
    coefficients = [Fraction(c) for c, _ in parts]
    if sum(coefficients) != 1 or any(c <= 0 for c in coefficients):
        raise ParameterOutOfRange(f"convex coefficients {coefficients} must be positive and sum to 1")
    out: Dict[Mat, Fraction] = {}
    for c, (_, D) in zip(coefficients, parts):
        for X, w in D.items():
            out[X] = out.get(X, Fraction(0)) + c * w
    return MatrixDistribution(out)


def translate(D: MatrixDistribution, B: Mat) -> MatrixDistribution:
    """Law of Ã + B."""
    return D.pushforward(lambda X: matadd(X, B))


def left_multiply(D: MatrixDistribution, U: Mat) -> MatrixDistribution:
    """Law of UÃ for invertible U."""
    if not is_full_rank(U) or U.m != U.n:
        raise NotFullRank("left factor must be invertible")
    return D.pushforward(lambda X: matmul(U, X))


def transpose_dist(D: MatrixDistribution) -> MatrixDistribution:
    """Law of Ã^T."""
    return D.pushforward(transpose)


def vector_pushforward(D: MatrixDistribution, u: Sequence[int]) -> Dict[Vector, Fraction]:
    """Law of the row vector u·Ã."""
    if len(u) != D.m:
        raise ShapeMismatch(f"vector of length {len(u)} against {D.m}x{D.n}")
    return D.image(lambda X: vec_matmul(u, X))


# k-goodness

@dataclass(frozen=True)
class GoodnessWitness:
    """A full-rank M and a target K with P(MÃ = K) != q^{-kn}."""

    M: Mat
    K: Mat
    probability: Fraction


@dataclass
class GoodnessVerdict:
    is_good: bool
    k: int
    witness: Optional[GoodnessWitness] = None
    classes_checked: int = 0

    def __bool__(self) -> bool:
        return self.is_good


def _image_is_uniform(image: Mapping, size: int, target: Fraction) -> bool:
    return len(image) == size and all(w == target for w in image.values())


def is_k_good(D: MatrixDistribution, k: int, cap: Optional[int] = None) -> GoodnessVerdict:
    """
    Exact k-goodness test.

    Full-rank M are visited in canonical order. MÃ is uniform iff GMÃ is
    for invertible G, so the verdict is cached per row space of M; the
    reported witness is the canonically first failing M together with the
    first K (canonical order) of wrong mass.

    Args:
        D: Distribution on GF(q)^{m x n}
        k: 1 <= k <= min(m, n)
        cap: Guard for the k x m enumeration

    Returns:
        GoodnessVerdict
    """
    m, n, f = D.m, D.n, D.field
    q = f.q
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    check_enumeration(q ** (k * n), cap, f"GF({q})^{{{k}x{n}}} targets")
    target = Fraction(1, q ** (k * n))
    size = q ** (k * n)

    verdicts: Dict[Tuple[Vector, ...], bool] = {}
    for M in enumerate_matrices(k, m, f, "full_rank", cap):
        key = row_space(M)
        ok = verdicts.get(key)
        if ok is None:
            ok = _image_is_uniform(D.image(lambda X: matmul(M, X)), size, target)
            verdicts[key] = ok
        if not ok:
            image = D.image(lambda X: matmul(M, X))
            for K in enumerate_matrices(k, n, f, cap=cap):
                p = image.get(K, Fraction(0))
                if p != target:
                    logger.debug(f"{D!r} is not {k}-good: P(MA = K) = {p}")
                    return GoodnessVerdict(False, k, GoodnessWitness(M, K, p), len(verdicts))
            raise InternalConsistencyError("non-uniform image without a deviating target")
    return GoodnessVerdict(True, k, None, len(verdicts))


def is_one_good_via_vectors(D: MatrixDistribution) -> bool:
    """u·Ã is uniform on GF(q)^n for every nonzero u."""
    q, m, n = D.field.q, D.m, D.n
    target = Fraction(1, q**n)
    for M in enumerate_matrices(1, m, D.field, "full_rank"):
        if not _image_is_uniform(vector_pushforward(D, M.row(0)), q**n, target):
            return False
    return True


def is_uniform(D: MatrixDistribution) -> bool:
    """Ã is uniform on all of GF(q)^{m x n}."""
    size = D.field.q ** (D.m * D.n)
    return len(D) == size and all(w == Fraction(1, size) for _, w in D.items())


def is_uniform_via_products(D: MatrixDistribution, cap: Optional[int] = None) -> bool:
    """
    For m <= n: M·Ã^T is uniform on GF(q)^{m x m} for every full-rank m x n M.

    Equivalent to ``is_uniform``; used as an independent path.
    """
    m, n, q = D.m, D.n, D.field.q
    if m > n:
        raise ParameterOutOfRange(f"need m <= n, got {m}x{n}")
    target = Fraction(1, q ** (m * m))
    for M in enumerate_matrices(m, n, D.field, "full_rank", cap):
        image = D.image(lambda X: matmul(M, transpose(X)))
        if not _image_is_uniform(image, q ** (m * m), target):
            return False
    return True


# Composition

JointWeights = Mapping[Tuple[Mat, Mat, Mat], Weight]


def compose(A: MatrixDistribution, joint: JointWeights) -> MatrixDistribution:
    """
    Law of P Ã Q + B with Ã independent of the jointly distributed (P, Q, B).

    Args:
        A: Distribution on GF(q)^{m x n}
        joint: {(P, Q, B): weight} with P full-rank s x m, Q full-rank n x t, B s x t

    Returns:
        Distribution on GF(q)^{s x t}
    """
    if not joint:
        raise EmptySupport("empty (P, Q, B) law")
    joint_items = [(key, Fraction(w)) for key, w in joint.items()]
    if sum(w for _, w in joint_items) != 1:
        raise ParameterOutOfRange("(P, Q, B) weights do not sum to 1")
    s, t = joint_items[0][0][0].m, joint_items[0][0][1].n
    for (P, Q, B), _ in joint_items:
        if P.shape != (s, A.m) or Q.shape != (A.n, t) or B.shape != (s, t):
            raise ShapeMismatch(f"P {P.shape}, Q {Q.shape}, B {B.shape} do not fit A {A.m}x{A.n}")
        if rank(P) != s or rank(Q) != t:
            raise NotFullRankSupport("P and Q must be supported on full-rank matrices")

    out: Dict[Mat, Fraction] = {}
    for (P, Q, B), w_pqb in joint_items:
        for X, w in A.items():
            Y = matadd(matmul(matmul(P, X), Q), B)
            out[Y] = out.get(Y, Fraction(0)) + w * w_pqb
    return MatrixDistribution(out)


def compose_independent(
    P: MatrixDistribution,
    A: MatrixDistribution,
    Q: MatrixDistribution,
    B: MatrixDistribution
) -> MatrixDistribution:
    """``compose`` with P, Q and B mutually independent."""
    joint = {}
    for Pm, wp in P.items():
        for Qm, wq in Q.items():
            for Bm, wb in B.items():
                joint[(Pm, Qm, Bm)] = wp * wq * wb
    return compose(A, joint)


# Support classification

@dataclass
class MinSupportReport:
    is_k_good: bool
    support_size: int
    minimum_size: int
    is_minimum: bool
    mrd_support: bool
    uniform_weights: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def classify_min_support(D: MatrixDistribution, k: int) -> MinSupportReport:
    """
    Compare a distribution with the minimum support size q^{k max(m,n)} of
    k-good matrices: minimum-support k-good laws are exactly uniform laws on
    MRD codes, and both directions are asserted.
    """
    m, n, q = D.m, D.n, D.field.q
    if not 1 <= k <= min(m, n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
    good = bool(is_k_good(D, k))
    minimum_size = q ** (k * max(m, n))
    uniform_weights = len(set(w for _, w in D.items())) == 1

    mrd_support = False
    if len(D) == minimum_size:
        mrd_support = len(D) == 1 or bool(is_mrd(MatrixCode(D.support), k))

    if good and len(D) < minimum_size:
        raise InternalConsistencyError(f"{k}-good law with support {len(D)} < {minimum_size}")
    if good and len(D) == minimum_size and not (mrd_support and uniform_weights):
        raise InternalConsistencyError("minimum-support k-good law is not uniform on an MRD code")
    if mrd_support and uniform_weights and not good:
        raise InternalConsistencyError("uniform law on an MRD code is not k-good")

    return MinSupportReport(
        is_k_good=good,
        support_size=len(D),
        minimum_size=minimum_size,
        is_minimum=good and len(D) == minimum_size,
        mrd_support=mrd_support,
        uniform_weights=uniform_weights,
    )


def full_rank_probability(D: MatrixDistribution) -> Fraction:
    """P(rank Ã = min(m, n))."""
    return D.mass(is_full_rank)


def rank_distribution(D: MatrixDistribution) -> Dict[int, Fraction]:
    image = D.image(rank)
    return {r: image.get(r, Fraction(0)) for r in range(min(D.m, D.n) + 1)}


# Seeded corpus

def _random_matrix(rng: np.random.Generator, field: FieldSpec, m: int, n: int) -> Mat:
    entries = tuple(int(x) for x in rng.integers(0, field.q, size=m * n))
    return Mat(field, m, n, entries)


def _random_invertible(rng: np.random.Generator, field: FieldSpec, size: int) -> Mat:
    while True:
        U = _random_matrix(rng, field, size, size)
        if is_full_rank(U):
            return U


def _random_support(rng: np.random.Generator, field: FieldSpec, m: int, n: int) -> MatrixDistribution:
    total = field.q ** (m * n)
    size = int(rng.integers(1, min(total, 24) + 1))
    points = {_random_matrix(rng, field, m, n) for _ in range(size)}
    raw = {X: int(rng.integers(1, 6)) for X in points}
    denominator = sum(raw.values())
    return MatrixDistribution({X: Fraction(w, denominator) for X, w in raw.items()})


def seeded_corpus(
    field: FieldSpec,
    m: int,
    n: int,
    count: int = 50,
    seed: Optional[int] = None
) -> List[MatrixDistribution]:
    """
    Reproducible list of distributions on GF(q)^{m x n}.

    The fixed head holds the uniform law on the full space, uniform laws on
    Gabidulin codes (prime fields only), both normalized homogeneous weights
    and a point mass at zero. The rest cycles through translates, left
    multiples, convex combinations and random supports drawn from
    ``np.random.default_rng(seed)``.
    """
    from src.codes.homweight import normalized_distribution

    seed = get_config().seed if seed is None else seed
    rng = np.random.default_rng(seed)
    check_enumeration(field.q ** (m * n), None, f"corpus over GF({field.q})^{{{m}x{n}}}")

    base: List[MatrixDistribution] = [uniform_full_space(field, m, n)]
    if field.is_prime_field:
        for k in range(1, min(m, n)):
            base.append(uniform_over(gabidulin(m, n, k, field).codewords))
    base.append(normalized_distribution("left", m, n, field))
    base.append(normalized_distribution("right", m, n, field))
    base.append(point_mass(Mat.zeros(field, m, n)))

    corpus = list(base)
    step = 0
    while len(corpus) < count:
        kind = step % 4
        parent = base[int(rng.integers(0, len(base)))]
        if kind == 0:
            corpus.append(translate(parent, _random_matrix(rng, field, m, n)))
        elif kind == 1:
            corpus.append(left_multiply(parent, _random_invertible(rng, field, m)))
        elif kind == 2:
            other = corpus[int(rng.integers(0, len(corpus)))]
            a = Fraction(int(rng.integers(1, 4)), 4)
            corpus.append(convex_combination([(a, parent), (1 - a, other)]))
        else:
            corpus.append(_random_support(rng, field, m, n))
        step += 1
    logger.debug(f"Seeded corpus over GF({field.q})^{{{m}x{n}}}: {len(corpus[:count])} members (seed {seed})")
    return corpus[:count]
