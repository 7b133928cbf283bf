"""
Closed-form subspace and matrix counts with brute-force oracles.

All counts are exact Python integers. Each closed form has an
independent oracle that enumerates subspaces (canonical RREF bases) or
matrices directly.
"""

from itertools import combinations, product
from typing import Iterator, List, Optional, Tuple
import logging

from src.algebra.gf import FieldSpec
from src.algebra.matrix import Mat, Vector, enumerate_matrices, matmul, rank, rank_census, rref_rows, transpose
from src.errors import ParameterOutOfRange

logger = logging.getLogger(__name__)

Subspace = Tuple[Vector, ...]


def gaussian_binomial(n: int, m: int, q: int) -> int:
    """[n choose m]_q; zero outside 0 <= m <= n, empty product is 1."""
    if m < 0 or m > n:
        return 0
    num, den = 1, 1
    for i in range(m):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def gl_order(n: int, q: int) -> int:
    """|GL_n(q)|."""
    order = 1
    for i in range(n):
        order *= q**n - q**i
    return order


def rank_count(m: int, n: int, r: int, q: int) -> int:
    """Number of m x n matrices of rank r."""
    if r < 0 or r > min(m, n):
        return 0
    count = gaussian_binomial(n, r, q)
    for i in range(r):
        count *= q**m - q**i
    return count


def anzahl_intersecting_subspaces(k: int, l: int, m: int, n: int, q: int) -> int:
    """
    Number of l-dimensional subspaces L of F_q^n with dim(L ∩ M) = k
    for a fixed m-dimensional M.

    Args:
        k: Intersection dimension (k <= min(l, m))
        l: Dimension of L
        m: Dimension of M
        n: Ambient dimension (l + m - k <= n)
        q: Field order

    Returns:
        q^{(l-k)(m-k)} [m k]_q [n-m l-k]_q
    """
    if min(k, l, m) < 0 or k > min(l, m) or l + m - k > n:
        raise ParameterOutOfRange(f"inadmissible tuple k={k}, l={l}, m={m}, n={n}")
    return q ** ((l - k) * (m - k)) * gaussian_binomial(m, k, q) * gaussian_binomial(n - m, l - k, q)


def anzahl_rank_k_products(k: int, l: int, m: int, n: int, q: int) -> int:
    """
    Number of full-rank M in F_q^{m x n} with rank(M N^T) = k for a fixed
    m x n matrix N of rank l.

    Args:
        k, l, m, n: Integers with k <= l <= m <= n and k + n >= l + m
        q: Field order

    Returns:
        q^{k(n-l-m+k)} [l k]_q [n-l m-k]_q prod_{i<m}(q^m - q^i)
    """
    if k < 0 or not (k <= l <= m <= n) or k + n < l + m:
        raise ParameterOutOfRange(f"inadmissible tuple k={k}, l={l}, m={m}, n={n}")
    return (
        q ** (k * (n - l - m + k))
        * gaussian_binomial(l, k, q)
        * gaussian_binomial(n - l, m - k, q)
        * gl_order(m, q)
    )


def mrd_orbit_count(m: int, n: int, q: int) -> int:
    """Number of distinct codes F_m·A over full-rank A: prod_{i=1}^{n-1}(q^m - q^i)."""
    if not m >= n >= 1:
        raise ParameterOutOfRange(f"need m >= n >= 1, got m={m}, n={n}")
    count = 1
    for i in range(1, n):
        count *= q**m - q**i
    return count


class SubspaceIterator:
    """
    Iterates the m-dimensional subspaces of F_q^n as canonical RREF bases.

    Order: pivot positions lexicographically, then free entries in
    canonical order.
    """

    def __init__(self, n: int, m: int, field: FieldSpec):
        if n < 0 or m < 0:
            raise ParameterOutOfRange(f"dimensions must be non-negative, got n={n}, m={m}")
        self.n = n
        self.m = m
        self.field = field

    def __len__(self) -> int:
        return gaussian_binomial(self.n, self.m, self.field.q)

    def __iter__(self) -> Iterator[Subspace]:
        n, m, q = self.n, self.m, self.field.q
        if m > n:
            return
        for pivots in combinations(range(n), m):
            pivot_set = set(pivots)
            # free slots: (row, col) with col > pivot of row and col not a pivot
            slots = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, n) if c not in pivot_set]
            for values in product(range(q), repeat=len(slots)):
                rows = [[0] * n for _ in range(m)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, c), v in zip(slots, values):
                    rows[i][c] = v
                yield tuple(tuple(r) for r in rows)


def subspaces(n: int, m: int, field: FieldSpec) -> List[Subspace]:
    return list(SubspaceIterator(n, m, field))


def all_subspaces(n: int, field: FieldSpec) -> List[Subspace]:
    """Every subspace of F_q^n, by increasing dimension."""
    return [s for m in range(n + 1) for s in SubspaceIterator(n, m, field)]


def subspace_dim_of_sum(a: Subspace, b: Subspace, field: FieldSpec, n: int) -> int:
    basis, _ = rref_rows(list(a) + list(b), field, n)
    return len(basis)


def canonical_subspace(vectors, field: FieldSpec, n: int) -> Subspace:
    basis, _ = rref_rows(list(vectors), field, n)
    return tuple(basis)


def brute_intersecting_subspaces(k: int, l: int, m: int, n: int, field: FieldSpec) -> int:
    """Count l-subspaces meeting M = <e_1..e_m> in dimension k by enumeration."""
    M = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(m))
    count = 0
    for L in SubspaceIterator(n, l, field):
        if l + m - subspace_dim_of_sum(L, M, field, n) == k:
            count += 1
    return count


def brute_rank_k_products(k: int, l: int, m: int, n: int, field: FieldSpec, method: str = "subspace") -> int:
    """
    Count full-rank M with rank(M N^T) = k for N = diag(I_l, 0) by enumeration.

    Args:
        method: "matrix" enumerates every m x n matrix; "subspace" enumerates
            the m-dimensional row spaces, classifies each by the dimension of
            its projection onto the first l coordinates and multiplies by
            |GL_m| (the number of bases of a fixed row space)

    Returns:
        The count
    """
    if method == "matrix":
        N = Mat.from_rows(field, [[1 if (i == j and i < l) else 0 for j in range(n)] for i in range(m)])
        Nt = transpose(N)
        count = 0
        for M in enumerate_matrices(m, n, field, "full_rank"):
            if rank(matmul(M, Nt)) == k:
                count += 1
        return count
    if method != "subspace":
        raise ParameterOutOfRange(f"unknown oracle method {method!r}")
    hits = 0
    for R in SubspaceIterator(n, m, field):
        projected, _ = rref_rows([row[:l] for row in R], field, l)
        if len(projected) == k:
            hits += 1
    return hits * gl_order(m, field.q)


def rank_sum_identity(k: int, m: int, n: int, q: int) -> Tuple[int, int]:
    """
    Both sides of sum_{l=k}^{min(m, n-m+k)} [n-m l-k]_q prod_{i<l-k}(q^{m-k} - q^i) = q^{(m-k)(n-m)}.
    """
    lhs = 0
    for l in range(k, min(m, n - m + k) + 1):
        term = gaussian_binomial(n - m, l - k, q)
        for i in range(l - k):
            term *= q ** (m - k) - q**i
        lhs += term
    return lhs, q ** ((m - k) * (n - m))


def gaussian_product_identity(n: int, l: int, m: int, k: int, q: int) -> Tuple[int, int]:
    """Both sides of [n l][l k][n-l m-k] = [n m][m k][n-m l-k]."""
    gb = gaussian_binomial
    return (
        gb(n, l, q) * gb(l, k, q) * gb(n - l, m - k, q),
        gb(n, m, q) * gb(m, k, q) * gb(n - m, l - k, q),
    )


def intersecting_tuples(n_max: int) -> Iterator[Tuple[int, int, int, int]]:
    """Admissible (k, l, m, n) for the intersecting-subspace count."""
    for n in range(1, n_max + 1):
        for m in range(0, n + 1):
            for l in range(0, n + 1):
                for k in range(0, min(l, m) + 1):
                    if l + m - k <= n:
                        yield (k, l, m, n)


def rank_product_tuples(n_max: int) -> Iterator[Tuple[int, int, int, int]]:
    """Admissible (k, l, m, n) for the rank-k product count."""
    for n in range(1, n_max + 1):
        for m in range(1, n + 1):
            for l in range(0, m + 1):
                for k in range(0, l + 1):
                    if k + n >= l + m:
                        yield (k, l, m, n)


def count_report(
    name: str,
    args: Tuple[int, ...],
    field: Optional[FieldSpec] = None,
    brute: bool = True
) -> dict:
    """
    Formula value with an optional brute-force cross-check (CLI ``count``).

    Returns:
        {"formula": int, "brute_force": int or None, "match": bool}
    """
    q = field.q if field is not None else None
    if name == "gaussian":
        n, m = args
        formula = gaussian_binomial(n, m, q)
        oracle = lambda: sum(1 for _ in SubspaceIterator(n, m, field)) if 0 <= m <= n else 0
    elif name == "intersecting":
        formula = anzahl_intersecting_subspaces(*args, q)
        oracle = lambda: brute_intersecting_subspaces(*args, field)
    elif name == "rank-products":
        formula = anzahl_rank_k_products(*args, q)
        oracle = lambda: brute_rank_k_products(*args, field)
    elif name == "orbits":
        formula = mrd_orbit_count(*args, q)
        from src.codes.rank_metric import field_code_orbit_count
        oracle = lambda: field_code_orbit_count(args[0], args[1], field)
    elif name == "rank":
        m, n, r = args
        formula = rank_count(m, n, r, q)
        oracle = lambda: rank_census(m, n, field).get(r, 0)
    else:
        raise ParameterOutOfRange(f"unknown count {name!r}")

    brute_value = oracle() if brute else None
    logger.debug(f"count {name}{args}: formula={formula}, brute={brute_value}")
    return {
        "formula": formula,
        "brute_force": brute_value,
        "match": brute_value is None or brute_value == formula,
    }
