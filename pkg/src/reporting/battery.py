"""
The reproduction battery behind ``mrdlab verify``.

Each check computes its value from scratch and compares it exactly with
the expected value; a check that raises is reported as failed with the
error in its detail, never as a crash of the battery.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Tuple
import logging
import math
import time

import numpy as np

from src.algebra.counting import (
    SubspaceIterator,
    count_report,
    gaussian_product_identity,
    intersecting_tuples,
    rank_sum_identity,
    rank_product_tuples,
)
from src.algebra.gf import field_make
from src.codes.distributions import (
    classify_min_support,
    is_k_good,
    seeded_corpus,
    transpose_dist,
    uniform_full_space,
    uniform_over,
)
from src.codes.homweight import coset_weight_sums, normalized_distribution, total_weight, weight_table
from src.codes.rank_metric import (
    MatrixCode,
    VectorMap,
    companion_matrix,
    gabidulin,
    is_complete_mapping,
    is_mrd,
    map_to_mrd,
    mrd_to_map,
)
from src.coding.random_coding import (
    VectorSet,
    all_vectors,
    exact_intersecting_failure,
    f_set_extract,
    intersecting_failure_bound,
    intersecting_failure_estimate,
    is_f_set,
    joint_law_check,
    nonzero_vectors,
    random_vectors,
    separating_2_1,
    singleton_family,
)
from src.config import get_config
from src.geometry.flats import (
    PointSet,
    affine_plane_of_order_four,
    build_22set,
    dense_six_set,
    intersection_pattern,
    is_k_dense,
    vertex_example_lines,
    vertex_example_subspace,
)
from src.geometry.search import find_mrd_subset, min_dense_size, verify_plane_lemma
from src.models import CheckResult, RunReport, SearchConfig

logger = logging.getLogger(__name__)

SCOPES = ("all", "fast")


@dataclass
class Outcome:
    expected: Any
    actual: Any
    passed: bool
    detail: Dict[str, Any]


CheckFn = Callable[[str], Outcome]


def _search(m: int, n: int, k: int, **kwargs):
    config = get_config()
    cfg = SearchConfig(
        m=m, n=n, q=2, k=k,
        node_budget=config.search_node_budget,
        time_budget=config.search_time_budget,
        threads=config.threads,
        **kwargs,
    )
    return min_dense_size(cfg)


def check_weight_tables(scope: str) -> Outcome:
    f = field_make(2)
    expected = {
        "left": [(1, Fraction(1, 42)), (2, Fraction(1, 84))],
        "right": [(1, Fraction(1, 56)), (2, Fraction(5, 336))],
    }
    actual = {side: weight_table(side, 2, 3, f) for side in ("left", "right")}
    return Outcome(expected, actual, actual == expected, {})


def check_total_weight(scope: str) -> Outcome:
    f = field_make(2)
    expected = {"c_2x3": 56, "c_3x2": 64}
    actual = {
        "c_2x3": total_weight("left", 2, 3, f),
        "c_3x2": total_weight("left", 3, 2, f),
    }
    shapes = 0
    for q in (2, 3):
        fq = field_make(q)
        for m in range(1, 4):
            for n in range(1, 4):
                for side in ("left", "right"):
                    total_weight(side, m, n, fq)
                    shapes += 1
    return Outcome(expected, actual, actual == expected, {"shapes_agreeing": shapes})


def check_weight_goodness(scope: str) -> Outcome:
    f = field_make(2)
    right = is_k_good(normalized_distribution("right", 2, 3, f), 1)
    left = is_k_good(normalized_distribution("left", 2, 3, f), 1)
    expected = {"right_1_good": True, "left_1_good": False}
    actual = {"right_1_good": right.is_good, "left_1_good": left.is_good}
    detail = {}
    if left.witness is not None:
        detail["left_witness"] = {
            "M": left.witness.M.to_lists(),
            "K": left.witness.K.to_lists(),
            "probability": left.witness.probability,
        }
    passed = actual == expected and left.witness is not None
    return Outcome(expected, actual, passed, detail)


def _nontrivial_censuses(side_shape: Tuple[int, int], dim: int) -> Tuple[set, set]:
    f = field_make(2)
    m, n = side_shape
    submodules, cosets = set(), set()
    for basis in SubspaceIterator(m, dim, f):
        sums = coset_weight_sums("right", m, n, f, basis)
        strip = lambda census: tuple(sorted((r, c) for r, c in census.items() if c))
        submodules.add(strip(sums[0].rank_census))
        cosets.update(strip(s.rank_census) for s in sums[1:])
    return submodules, cosets


def check_coset_census(scope: str) -> Outcome:
    sub23, cos23 = _nontrivial_censuses((2, 3), 1)
    sub32, cos32 = _nontrivial_censuses((3, 2), 2)
    expected = {
        "2x3_cosets": [[(1, 2), (2, 6)]],
        "3x2_submodule": [[(0, 1), (1, 9), (2, 6)]],
        "3x2_cosets": [[(1, 4), (2, 12)]],
    }
    actual = {
        "2x3_cosets": sorted(list(c) for c in cos23),
        "3x2_submodule": sorted(list(c) for c in sub32),
        "3x2_cosets": sorted(list(c) for c in cos32),
    }
    return Outcome(expected, actual, actual == expected, {"2x3_submodules": sorted(list(c) for c in sub23)})


def check_gabidulin(scope: str) -> Outcome:
    f = field_make(2)
    cases = [(3, 3, 1), (3, 3, 2), (3, 2, 1), (2, 3, 1)]
    expected, actual = {}, {}
    for m, n, k in cases:
        code = gabidulin(m, n, k, f)
        report = classify_min_support(uniform_over(code.codewords), k)
        key = f"{m}x{n}_k{k}"
        expected[key] = {"mrd": True, "k_good": True, "size": 2 ** (k * max(m, n)), "minimum": True}
        actual[key] = {
            "mrd": bool(is_mrd(code, k)),
            "k_good": report.is_k_good,
            "size": len(code),
            "minimum": report.is_minimum,
        }
    return Outcome(expected, actual, actual == expected, {})


def check_duality(scope: str) -> Outcome:
    f = field_make(2)
    corpus = seeded_corpus(f, 2, 3, count=50, seed=get_config().seed)
    mismatches, nesting_failures = [], []
    good_counts = {1: 0, 2: 0}
    for i, D in enumerate(corpus):
        verdicts = {}
        for k in (1, 2):
            verdicts[k] = is_k_good(D, k).is_good
            if verdicts[k] != is_k_good(transpose_dist(D), k).is_good:
                mismatches.append((i, k))
            good_counts[k] += verdicts[k]
        if verdicts[2] and not verdicts[1]:
            nesting_failures.append(i)
    actual = {"transpose_mismatches": len(mismatches), "nesting_failures": len(nesting_failures)}
    expected = {"transpose_mismatches": 0, "nesting_failures": 0}
    return Outcome(expected, actual, actual == expected, {"corpus": len(corpus), "good": good_counts})


def check_counting(scope: str) -> Outcome:
    tuples = mismatches = 0
    for q in (2, 3):
        f = field_make(q)
        for name, family in (("intersecting", intersecting_tuples), ("rank-products", rank_product_tuples)):
            for args in family(4):
                tuples += 1
                if not count_report(name, args, f)["match"]:
                    mismatches += 1
                    logger.warning(f"count {name}{args} over GF({q}) disagrees")
    identities = identity_failures = 0
    for q in (2, 3):
        for n in range(0, 6):
            for m in range(0, n + 1):
                for k in range(0, m + 1):
                    identities += 1
                    lhs, rhs = rank_sum_identity(k, m, n, q)
                    identity_failures += lhs != rhs
                    for l in range(k, n + 1):
                        identities += 1
                        lhs, rhs = gaussian_product_identity(n, l, m, k, q)
                        identity_failures += lhs != rhs
    expected = {"count_mismatches": 0, "identity_failures": 0}
    actual = {"count_mismatches": mismatches, "identity_failures": identity_failures}
    return Outcome(expected, actual, actual == expected, {"tuples": tuples, "identities": identities})


def check_nu1_3x2(scope: str) -> Outcome:
    result = _search(3, 2, 1)
    six = dense_six_set()
    expected = {"nu": 6, "proof": True, "six_set_dense": True}
    actual = {"nu": result.minimum, "proof": result.proof, "six_set_dense": bool(is_k_dense(six, 1))}
    return Outcome(expected, actual, actual == expected, {"nodes": result.nodes, "symmetry": result.symmetry})


def check_nu2_3x2(scope: str) -> Outcome:
    S = build_22set()
    expected = {"size": 22, "line_blocking": True, "histogram": {1: 91, 3: 21}}
    actual = {"size": len(S), "line_blocking": bool(is_k_dense(S, 2)), "histogram": intersection_pattern(S, 1)}
    detail = {}
    if scope == "all":
        result = _search(3, 2, 2)
        expected.update({"nu": 22, "proof": True})
        actual.update({"nu": result.minimum, "proof": result.proof})
        detail = {"nodes": result.nodes, "symmetry": result.symmetry, "seconds": result.seconds}
    else:
        detail = {"search": "skipped in fast scope"}
    return Outcome(expected, actual, actual == expected, detail)


def check_floor_cases(scope: str) -> Outcome:
    f = field_make(2)
    expected = {"nu1_2x1": 3, "nu1_2x2": 4, "nu1_2x3": 8, "mrd_witnesses": True}
    actual = {}
    witnesses_mrd = True
    for key, (m, n) in (("nu1_2x1", (2, 1)), ("nu1_2x2", (2, 2)), ("nu1_2x3", (2, 3))):
        result = _search(m, n, 1)
        actual[key] = result.minimum
        if n >= m:
            code = MatrixCode(PointSet.from_indices(f, m, n, result.witness_indices).points)
            witnesses_mrd &= bool(is_mrd(code, 1))
    actual["mrd_witnesses"] = witnesses_mrd
    return Outcome(expected, actual, actual == expected, {})


def check_plane_lemma(scope: str) -> Outcome:
    lemma = verify_plane_lemma()
    plane = affine_plane_of_order_four()
    expected = {"lemma_holds": True, "lines": 20, "every_pair_once": True}
    actual = {"lemma_holds": lemma["holds"], "lines": plane["lines"], "every_pair_once": plane["every_pair_once"]}
    detail = {str(size): lemma[size] for size in (5, 6, 7, 8)}
    return Outcome(expected, actual, actual == expected, detail)


def check_vertex_example(scope: str) -> Outcome:
    S = vertex_example_subspace()
    lines = vertex_example_lines()
    hist = intersection_pattern(S, 1)
    expected = {"size": 16, "histogram": [2], "meet_in_two": True, "sum_is_zero": True, "mrd_subset": None}
    code = find_mrd_subset(S, 1)
    actual = {
        "size": len(S),
        "histogram": sorted(hist),
        "meet_in_two": lines["meet_in_two"],
        "sum_is_zero": lines["sum_is_zero"],
        "mrd_subset": None if code is None else list(code.indices),
    }
    return Outcome(expected, actual, actual == expected, {"A": [X.to_lists() for X in lines["points"]]})


def check_orthomorphism(scope: str) -> Outcome:
    f = field_make(2)
    g = VectorMap.linear(companion_matrix([1, 1, 1], f))
    code = map_to_mrd(g)
    identity = VectorMap.identity(f, 2)
    expected = {"complete": True, "mrd": True, "round_trip": True, "identity_complete": False}
    actual = {
        "complete": is_complete_mapping(g),
        "mrd": bool(is_mrd(code, 1)),
        "round_trip": mrd_to_map(code) == g,
        "identity_complete": is_complete_mapping(identity),
    }
    return Outcome(expected, actual, actual == expected, {})


def check_joint_laws(scope: str) -> Outcome:
    f = field_make(2)
    uniform = uniform_full_space(f, 2, 2)
    linear = joint_law_check(uniform, VectorSet.any_k_independent(f, nonzero_vectors(f, 2), 2), "linear", 2)
    affine = joint_law_check(uniform, VectorSet.cap_condition(f, all_vectors(f, 2), 2), "affine", 2)
    expected = {
        "linear": True, "linear_law": Fraction(1, 16),
        "affine": True, "affine_law": Fraction(1, 64),
    }
    actual = {
        "linear": linear.holds, "linear_law": linear.target,
        "affine": affine.holds, "affine_law": affine.target,
    }
    detail = {}
    D = uniform_full_space(f, 2, 3)
    for k in (1, 2):
        exact = exact_intersecting_failure(D, k)
        bound = intersecting_failure_bound(2, 3, 2, k)
        expected[f"failure_within_bound_k{k}"] = True
        actual[f"failure_within_bound_k{k}"] = exact <= bound
        detail[f"k{k}"] = {"exact": exact, "bound": bound}
        if scope == "all":
            trials = 20_000
            estimate = intersecting_failure_estimate(D, k, trials, seed=get_config().seed)
            p = float(exact)
            tolerance = 4 * math.sqrt(max(p * (1 - p), 1e-12) / trials)
            expected[f"estimate_close_k{k}"] = True
            actual[f"estimate_close_k{k}"] = abs(float(estimate) - p) <= tolerance
            detail[f"k{k}"]["estimate"] = estimate
    return Outcome(expected, actual, actual == expected, detail)


def check_f_set_extraction(scope: str) -> Outcome:
    f = field_make(2)
    rng = np.random.default_rng(get_config().seed)
    families = [(singleton_family(2, 2), 4), (separating_2_1, 6)]
    trials = failures = kept = 0
    for family, n in families:
        for _ in range(100):
            sample = random_vectors(f, n, 8, rng)
            result = f_set_extract(sample, family)
            trials += 1
            kept += len(result.kept)
            failures += not is_f_set(result.kept, family)
    expected = {"trials": 200, "verifier_failures": 0}
    actual = {"trials": trials, "verifier_failures": failures}
    return Outcome(expected, actual, actual == expected, {"mean_kept": Fraction(kept, trials)})


CHECKS: List[Tuple[str, str, CheckFn]] = [
    ("weight_tables", "homogeneous weights, binary 2x3 example", check_weight_tables),
    ("total_weight", "total weight closed form", check_total_weight),
    ("weight_goodness", "normalized homogeneous weights and 1-goodness", check_weight_goodness),
    ("coset_census", "rank census of submodule cosets", check_coset_census),
    ("gabidulin", "Gabidulin codes and minimum support", check_gabidulin),
    ("duality", "transpose duality of k-goodness", check_duality),
    ("counting", "subspace and rank-product counts", check_counting),
    ("nu1_3x2", "nu_1(3,2,2) = 6", check_nu1_3x2),
    ("nu2_3x2", "nu_2(3,2,2) = 22", check_nu2_3x2),
    ("floor_cases", "nu_1(m,1,q) and the MRD floor", check_floor_cases),
    ("plane_lemma", "blocking sets of RAG(2,2,2)", check_plane_lemma),
    ("vertex_example", "1-good subspace without MRD subcode", check_vertex_example),
    ("orthomorphism", "complete mappings and (2,2,1) MRD codes", check_orthomorphism),
    ("joint_laws", "joint laws and intersecting codes", check_joint_laws),
    ("f_set_extraction", "pattern-set extraction", check_f_set_extraction),
]


def run_check(name: str, anchor: str, fn: CheckFn, scope: str) -> CheckResult:
    start = time.time()
    try:
        outcome = fn(scope)
        result = CheckResult(
            name=name, anchor=anchor, expected=outcome.expected, actual=outcome.actual,
            passed=outcome.passed, seconds=time.time() - start, detail=outcome.detail,
        )
    except Exception as e:
        logger.error(f"Check {name} raised: {e}", exc_info=True)
        result = CheckResult(
            name=name, anchor=anchor, expected=None, actual=None, passed=False,
            seconds=time.time() - start, detail={"error": type(e).__name__, "message": str(e)},
        )
    logger.info(f"[{'PASS' if result.passed else 'FAIL'}] {name} ({result.seconds:.2f}s)")
    return result


def run_battery(scope: str = "all") -> RunReport:
    """
    Run every reproduction check.

    Args:
        scope: "all", or "fast" to skip the nu_2 search and the Monte
            Carlo estimates

    Returns:
        RunReport with one CheckResult per check
    """
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    start = time.time()
    report = RunReport(scope=scope)
    for name, anchor, fn in CHECKS:
        report.checks.append(run_check(name, anchor, fn, scope))
    report.seconds = time.time() - start
    logger.info(f"Battery ({scope}): {report.passed} passed, {report.failed} failed in {report.seconds:.1f}s")
    return report
