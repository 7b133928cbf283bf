"""
Random coding with k-good matrices.

A k-good random matrix A turns a vector set U = {u_i} into a random
sequence F(i) = u_i A (optionally + v with v uniform and independent).
This module checks the resulting joint laws exactly, bounds and measures
the probability that the row space of A fails to be k-wise intersecting,
and runs the finite-n pattern-set extraction procedure with an
independent verifier.
"""

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import partial
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging
import math
import multiprocessing as mp

import numpy as np

from src.algebra.gf import FieldSpec, field_make
from src.algebra.matrix import Mat, Vector, check_enumeration, rank, row_space, span, vec_matmul
from src.codes.distributions import MatrixDistribution, is_k_good
from src.config import get_config
from src.errors import (
    EnumerationTooLarge,
    InternalConsistencyError,
    ParameterOutOfRange,
    PropertyNotVerified,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)


def _vec_add(field: FieldSpec, a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(field.add(x, y) for x, y in zip(a, b))


def _vec_sub(field: FieldSpec, a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(field.sub(x, y) for x, y in zip(a, b))


def _vector_rank(vectors: Sequence[Sequence[int]], field: FieldSpec) -> int:
    return rank(Mat.from_rows(field, vectors)) if vectors else 0


# Pattern families

@dataclass(frozen=True)
class PatternFamily:
    """A family of nonempty subsets of GF(q)^k."""

    q: int
    k: int
    sets: Tuple[FrozenSet[Vector], ...]
    name: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise ParameterOutOfRange(f"pattern length must be >= 1, got {self.k}")
        if not self.sets:
            raise ParameterOutOfRange("a pattern family needs at least one member")
        for S in self.sets:
            if not S:
                raise ParameterOutOfRange("pattern family members must be nonempty")
            for v in S:
                if len(v) != self.k or any(not 0 <= x < self.q for x in v):
                    raise ParameterOutOfRange(f"{v} is not a vector of GF({self.q})^{self.k}")

    @classmethod
    def from_lists(cls, q: int, k: int, sets: Iterable[Iterable[Sequence[int]]], name: str = "") -> "PatternFamily":
        return cls(q, k, tuple(frozenset(tuple(v) for v in S) for S in sets), name)

    @property
    def min_size(self) -> int:
        return min(len(S) for S in self.sets)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "q": self.q,
            "k": self.k,
            "sets": [sorted(list(v) for v in S) for S in self.sets],
        }


separating_2_1 = PatternFamily.from_lists(
    2, 3,
    [
        [(0, 0, 1), (1, 1, 0)],
        [(0, 1, 0), (1, 0, 1)],
        [(1, 0, 0), (0, 1, 1)],
    ],
    name="separating_2_1",
)


def singleton_family(q: int, k: int) -> PatternFamily:
    """{{v} : v in GF(q)^k}; its pattern sets are the k-independent families."""
    return PatternFamily.from_lists(q, k, ([v] for v in product(range(q), repeat=k)), name=f"singletons_{q}_{k}")


def pattern_set(vectors: Sequence[Sequence[int]]) -> FrozenSet[Vector]:
    """Set of columns of the matrix whose rows are ``vectors``, in that order."""
    return frozenset(zip(*vectors))


# Vector sets

VECTOR_PROPERTIES = ("any_k_independent", "cap_condition")


@dataclass(frozen=True)
class VectorSet:
    """
    Vectors u_1..u_M of GF(q)^m with a property verified at construction:

    - any_k_independent: any k of them are linearly independent
    - cap_condition: no k+1 of them lie on a (k-1)-flat of AG(m, q)
    """

    field: FieldSpec
    m: int
    vectors: Tuple[Vector, ...]
    property: str
    k: int

    def __post_init__(self):
        if self.property not in VECTOR_PROPERTIES:
            raise ParameterOutOfRange(f"unknown vector set property {self.property!r}")
        if self.k < 1:
            raise ParameterOutOfRange(f"k must be >= 1, got {self.k}")
        for u in self.vectors:
            if len(u) != self.m:
                raise ShapeMismatch(f"vector {u} is not in GF({self.field.q})^{self.m}")
        if self.property == "any_k_independent":
            self._verify_independent()
        else:
            self._verify_cap()

    def _verify_independent(self):
        k = self.k
        check_enumeration(math.comb(len(self.vectors), k), None, f"{k}-subsets of {len(self.vectors)} vectors")
        for idx in combinations(range(len(self.vectors)), k):
            if _vector_rank([self.vectors[i] for i in idx], self.field) < k:
                raise PropertyNotVerified(f"vectors {idx} are linearly dependent", indices=list(idx))

    def _verify_cap(self):
        k = self.k
        check_enumeration(math.comb(len(self.vectors), k + 1), None, f"{k + 1}-subsets of {len(self.vectors)} vectors")
        for idx in combinations(range(len(self.vectors)), k + 1):
            base = self.vectors[idx[0]]
            diffs = [_vec_sub(self.field, self.vectors[i], base) for i in idx[1:]]
            if _vector_rank(diffs, self.field) < k:
                raise PropertyNotVerified(f"vectors {idx} lie on a {k - 1}-flat", indices=list(idx))

    def __len__(self) -> int:
        return len(self.vectors)

    @classmethod
    def any_k_independent(cls, field: FieldSpec, vectors: Iterable[Sequence[int]], k: int) -> "VectorSet":
        vs = tuple(tuple(v) for v in vectors)
        m = len(vs[0]) if vs else 0
        return cls(field, m, vs, "any_k_independent", k)

    @classmethod
    def cap_condition(cls, field: FieldSpec, vectors: Iterable[Sequence[int]], k: int) -> "VectorSet":
        vs = tuple(tuple(v) for v in vectors)
        m = len(vs[0]) if vs else 0
        return cls(field, m, vs, "cap_condition", k)


def nonzero_vectors(field: FieldSpec, m: int) -> List[Vector]:
    return [v for v in product(range(field.q), repeat=m) if any(v)]


def all_vectors(field: FieldSpec, m: int) -> List[Vector]:
    return list(product(range(field.q), repeat=m))


# Joint laws

@dataclass
class JointLawVerdict:
    holds: bool
    mode: str
    k: int
    tuples_checked: int
    target: Fraction
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "mode": self.mode,
            "k": self.k,
            "tuples_checked": self.tuples_checked,
            "target": str(self.target),
            "witness": self.witness,
        }


def _joint_law(D: MatrixDistribution, us: Sequence[Vector], affine: bool) -> Dict[Tuple[Vector, ...], Fraction]:
    f, n = D.field, D.n
    law: Dict[Tuple[Vector, ...], Fraction] = {}
    shifts = all_vectors(f, n) if affine else [None]
    share = Fraction(1, len(shifts))
    for X, w in D.items():
        images = [vec_matmul(u, X) for u in us]
        for v in shifts:
            key = tuple(images) if v is None else tuple(_vec_add(f, x, v) for x in images)
            law[key] = law.get(key, Fraction(0)) + w * share
    return law


def joint_law_check(D: MatrixDistribution, U: VectorSet, mode: str, k: int) -> JointLawVerdict:
    """
    Exact joint law of (F(i_1), ..., F(i_t)) over every index tuple.

    Linear mode: F(i) = u_i A, t = k, each law must equal q^{-kn}.
    Affine mode: F(i) = u_i A + v with v uniform, t = k + 1, each law must
    equal q^{-(k+1)n}.

    Raises:
        PropertyNotVerified: D is not k-good or U was declared for another mode or k
        EnumerationTooLarge: elementary events exceed Config.exact_event_cap
    """
    if mode not in ("linear", "affine"):
        raise ParameterOutOfRange(f"mode must be 'linear' or 'affine', got {mode!r}")
    expected = "any_k_independent" if mode == "linear" else "cap_condition"
    if U.property != expected or U.k != k:
        raise PropertyNotVerified(f"{mode} mode needs a {expected} vector set with k={k}")
    if U.field != D.field or U.m != D.m:
        raise ShapeMismatch(f"vectors of GF({U.field.q})^{U.m} against {D.m}x{D.n} matrices")
    verdict = is_k_good(D, k)
    if not verdict:
        raise PropertyNotVerified(f"distribution is not {k}-good", witness=str(verdict.witness))

    q, n = D.field.q, D.n
    t = k if mode == "linear" else k + 1
    tuples = math.comb(len(U), t)
    events = tuples * len(D) * (q ** n if mode == "affine" else 1)
    check_enumeration(events, get_config().exact_event_cap, f"{mode} joint law sweep")
    check_enumeration(q ** (t * n), None, f"value tuples in (GF({q})^{n})^{t}")

    target = Fraction(1, q ** (t * n))
    checked = 0
    for idx in combinations(range(len(U)), t):
        law = _joint_law(D, [U.vectors[i] for i in idx], mode == "affine")
        checked += 1
        if len(law) == q ** (t * n) and all(p == target for p in law.values()):
            continue
        for values in product(all_vectors(D.field, n), repeat=t):
            p = law.get(values, Fraction(0))
            if p != target:
                witness = {"indices": list(idx), "values": [list(v) for v in values], "probability": str(p)}
                logger.info(f"Joint law fails at indices {idx}: P = {p}, expected {target}")
                return JointLawVerdict(False, mode, k, checked, target, witness)
        raise InternalConsistencyError("non-uniform joint law without a deviating value tuple")
    logger.debug(f"{mode} joint law q^-{t * n} verified over {checked} index tuples")
    return JointLawVerdict(True, mode, k, checked, target)


# Intersecting codes

@dataclass
class IntersectingVerdict:
    holds: bool
    k: int
    witness: Optional[Tuple[Vector, ...]] = None

    def __bool__(self) -> bool:
        return self.holds


def _intersect(vectors: Sequence[Sequence[int]]) -> bool:
    return any(all(column) for column in zip(*vectors))


def is_k_wise_intersecting(rows: Sequence[Sequence[int]], field: FieldSpec, k: int) -> IntersectingVerdict:
    """
    Do any k linearly independent codewords of the row space of ``rows``
    share a coordinate where all of them are nonzero?
    """
    if k < 1:
        raise ParameterOutOfRange(f"k must be >= 1, got {k}")
    if not rows:
        return IntersectingVerdict(True, k)
    n = len(rows[0])
    codewords = [c for c in span(rows, field, n) if any(c)]
    check_enumeration(math.comb(len(codewords), k), None, f"{k}-subsets of {len(codewords)} codewords")
    for group in combinations(codewords, k):
        if _vector_rank(group, field) < k:
            continue
        if not _intersect(group):
            return IntersectingVerdict(False, k, group)
    return IntersectingVerdict(True, k)


def intersecting_failure_bound(m: int, n: int, q: int, k: int) -> Fraction:
    """(1 - (1 - 1/q)^k)^n * prod_{i<k} (q^m - q^i); vacuous once above 1."""
    if not 1 <= k <= m:
        raise ParameterOutOfRange(f"k={k} outside 1..{m}")
    bound = (1 - (1 - Fraction(1, q)) ** k) ** n
    for i in range(k):
        bound *= q ** m - q ** i
    return bound


def _fails(A: Mat, k: int) -> bool:
    return not is_k_wise_intersecting(A.rows(), A.field, k)


def exact_intersecting_failure(D: MatrixDistribution, k: int) -> Fraction:
    """P{row space of A is not k-wise intersecting}, by a sweep of the support."""
    q, m = D.field.q, D.m
    events = len(D) * math.comb(q ** m, k)
    check_enumeration(events, get_config().exact_event_cap, "intersecting failure sweep")
    verdicts: Dict[Tuple[Vector, ...], bool] = {}
    total = Fraction(0)
    for X, w in D.items():
        key = row_space(X)
        if key not in verdicts:
            verdicts[key] = _fails(X, k)
        if verdicts[key]:
            total += w
    logger.debug(f"Exact failure probability {total} over {len(verdicts)} distinct row spaces")
    return total


def _estimate_worker(payload: dict, job: Tuple[int, np.random.SeedSequence]) -> int:
    trials, seed_seq = job
    field = field_make(*payload["field"])
    m, n, k = payload["m"], payload["n"], payload["k"]
    rng = np.random.default_rng(seed_seq)
    draws = rng.choice(len(payload["support"]), size=trials, p=payload["probs"])
    verdicts: Dict[int, bool] = {}
    failures = 0
    for i in draws:
        i = int(i)
        if i not in verdicts:
            verdicts[i] = _fails(Mat.from_index(field, m, n, payload["support"][i]), k)
        failures += verdicts[i]
    return failures


def intersecting_failure_estimate(
    D: MatrixDistribution,
    k: int,
    trials: int,
    seed: Optional[int] = None,
    workers: Optional[int] = None
) -> Fraction:
    """
    Monte Carlo frequency of non-k-wise-intersecting row spaces under D.

    Trials are split over ``workers`` child seeds of SeedSequence(seed),
    so the estimate is reproducible for a fixed (seed, workers) pair.
    """
    if trials < 1:
        raise ParameterOutOfRange(f"trials must be >= 1, got {trials}")
    config = get_config()
    seed = config.seed if seed is None else seed
    workers = max(1, min(workers or config.threads, trials))
    verdict = is_k_good(D, k)
    if not verdict:
        logger.warning(f"Sampling from a distribution that is not {k}-good")

    support = [X.index for X in D.support]
    probs = np.array([float(D[X]) for X in D.support])
    probs /= probs.sum()
    payload = {"field": D.field.key, "m": D.m, "n": D.n, "k": k, "support": support, "probs": probs}
    children = np.random.SeedSequence(seed).spawn(workers)
    shares = [trials // workers + (1 if i < trials % workers else 0) for i in range(workers)]
    jobs = list(zip(shares, children))
    worker = partial(_estimate_worker, payload)
    if workers > 1:
        with mp.Pool(workers) as pool:
            failures = sum(pool.map(worker, jobs))
    else:
        failures = sum(worker(job) for job in jobs)
    logger.info(f"Monte Carlo: {failures}/{trials} failures (seed {seed}, {workers} workers)")
    return Fraction(failures, trials)


def intersecting_failure(D: MatrixDistribution, k: int, trials: int = 10_000, seed: Optional[int] = None) -> Tuple[Fraction, bool]:
    """Exact probability when the sweep fits the event cap, else an estimate; returns (value, exact)."""
    try:
        return exact_intersecting_failure(D, k), True
    except EnumerationTooLarge:
        logger.warning("Exact sweep exceeds the event cap, falling back to Monte Carlo")
        return intersecting_failure_estimate(D, k, trials, seed), False


# Pattern sets

@dataclass
class Extraction:
    kept: List[Vector]
    removed: int
    undesirable_tuples: int
    undesirable_pairs: int
    removed_indices: List[int] = dataclass_field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kept": [list(v) for v in self.kept],
            "removed": self.removed,
            "undesirable_tuples": self.undesirable_tuples,
            "undesirable_pairs": self.undesirable_pairs,
            "removed_indices": self.removed_indices,
        }


def _check_vectors(C: Sequence[Sequence[int]], F: PatternFamily):
    if C:
        n = len(C[0])
        for v in C:
            if len(v) != n or any(not 0 <= x < F.q for x in v):
                raise ShapeMismatch(f"{tuple(v)} is not a vector of GF({F.q})^{n}")


def is_f_set(C: Sequence[Sequence[int]], F: PatternFamily) -> bool:
    """Every ordered k-tuple of distinct elements of C has columns meeting every S in F."""
    _check_vectors(C, F)
    elements = sorted(set(tuple(v) for v in C))
    if len(elements) != len(C):
        return False
    check_enumeration(math.perm(len(elements), F.k) * len(F.sets), None, "pattern set verification")
    for S in F.sets:
        for group in permutations(elements, F.k):
            if not any(column in S for column in zip(*group)):
                return False
    return True


def f_set_extract(C: Sequence[Sequence[int]], F: PatternFamily) -> Extraction:
    """
    Drop every component of an undesirable k-tuple (distinct indices whose
    column pattern misses some member of F) or pair (equal vectors at
    distinct indices); what remains is an F-set with distinct elements.
    """
    _check_vectors(C, F)
    vectors = [tuple(v) for v in C]
    M, k = len(vectors), F.k
    check_enumeration(math.perm(M, k) * len(F.sets), None, f"ordered {k}-tuples of {M} vectors")

    doomed = set()
    pairs = 0
    for i, j in combinations(range(M), 2):
        if vectors[i] == vectors[j]:
            pairs += 2
            doomed.update((i, j))

    tuples = 0
    for idx in permutations(range(M), k):
        W = pattern_set([vectors[i] for i in idx])
        if any(not W & S for S in F.sets):
            tuples += 1
            doomed.update(idx)

    kept = [v for i, v in enumerate(vectors) if i not in doomed]
    if not is_f_set(kept, F):
        raise InternalConsistencyError("extracted set is not a pattern set")
    logger.debug(f"Extraction kept {len(kept)}/{M} ({tuples} undesirable tuples, {pairs} undesirable pairs)")
    return Extraction(kept, M - len(kept), tuples, pairs, sorted(doomed))


def random_vectors(field: FieldSpec, n: int, count: int, rng: np.random.Generator) -> List[Vector]:
    return [tuple(int(x) for x in row) for row in rng.integers(0, field.q, size=(count, n))]


def random_code_rows(
    D: MatrixDistribution,
    U: VectorSet,
    seed: Optional[int] = None,
    affine: bool = False
) -> List[Vector]:
    """One draw of the sequence u_i A (+ v) with A ~ D and v uniform."""
    if U.field != D.field or U.m != D.m:
        raise ShapeMismatch(f"vectors of GF({U.field.q})^{U.m} against {D.m}x{D.n} matrices")
    seed = get_config().seed if seed is None else seed
    rng = np.random.default_rng(seed)
    probs = np.array([float(D[X]) for X in D.support])
    A = D.support[int(rng.choice(len(D), p=probs / probs.sum()))]
    rows = [vec_matmul(u, A) for u in U.vectors]
    if affine:
        v = random_vectors(D.field, D.n, 1, rng)[0]
        rows = [_vec_add(D.field, r, v) for r in rows]
    return rows


# Rate formulas (reporting only)

def intersecting_rate_bound(q: int, k: int) -> float:
    """1 - log_q(q^k - (q-1)^k) / k."""
    return 1 - math.log(q ** k - (q - 1) ** k, q) / k


def f_set_rate_bound(F: PatternFamily) -> float:
    """min{(k - log_q(q^k - min |S|)) / (k - 1), 1} for k >= 2."""
    if F.k < 2:
        raise ParameterOutOfRange("the rate formula needs k >= 2")
    q, k = F.q, F.k
    if F.min_size >= q ** k:
        return 1.0
    return min((k - math.log(q ** k - F.min_size, q)) / (k - 1), 1.0)
