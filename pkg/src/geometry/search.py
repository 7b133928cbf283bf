"""
Exact minimum-size search for k-dense sets of GF(q)^{m x n}.

A set is k-dense iff it blocks every (m-k)-flat of RAG(m,n,q), so the
search is a hitting-set branch and bound over point bitmasks:

- branch on the first unblocked flat in canonical order, point i of the
  flat included and points before it excluded, so the first witness
  found is the same for any thread count;
- lower bounds from parallel classes, disjoint packings, point degrees
  and exact minimum completions of the (m-k+1)-flats ("sections");
- symmetry: the group X -> UXW + C maps flats to flats and is transitive
  on sections, so the minimum section may be assumed to be the first
  section H1, its trace lex-minimal under the stabiliser of H1, and every
  other section at least as large. Without sections only translations
  are used (0 in S).

The minimum is found by deciding s = lower bound, lower bound + 1, ...
so a returned minimum carries a proof unless a budget ran out.
"""

from dataclasses import dataclass
from functools import partial
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math
import multiprocessing as mp
import time

import networkx as nx
import numpy as np

from src.algebra.gf import FieldSpec, field_from_order, field_make
from src.algebra.matrix import Mat, check_enumeration, enumerate_matrices, matmul, matsub, rank, span
from src.codes.rank_metric import MatrixCode, is_mrd
from src.config import get_config
from src.errors import BudgetExhausted, EnumerationTooLarge, InternalConsistencyError, ParameterOutOfRange
from src.geometry.flats import FlatSystem, PointSet, _bits, _point_add, flat_system, is_k_dense
from src.models import SearchConfig, SearchResult

logger = logging.getLogger(__name__)

INFEASIBLE = math.inf
MEMO_LIMIT = 2_000_000
# tasks per decide call, fixed so the split does not depend on the thread count
SPLIT_TASKS = 32

# (include mask, exclude mask, section floor)
Task = Tuple[int, int, int]


class _BudgetHit(Exception):
    pass


class _Budget:
    def __init__(self, node_limit: int, deadline: float):
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise _BudgetHit()
        if not self.nodes & 1023 and time.time() > self.deadline:
            raise _BudgetHit()


class DenseSetSearch:
    """Branch and bound state for one geometry; reusable across decide calls."""

    def __init__(self, m: int, n: int, k: int, field: FieldSpec, seed: Optional[int] = None):
        if not 1 <= k <= min(m, n):
            raise ParameterOutOfRange(f"k={k} outside 1..{min(m, n)}")
        self.m, self.n, self.k, self.field = m, n, k, field
        self.targets: FlatSystem = flat_system("right", m, n, field, m - k)
        self.num_points = self.targets.num_points
        self.full = (1 << self.num_points) - 1
        self.masks: List[int] = list(self.targets.masks)
        self.flat_class: List[int] = [0] * len(self.masks)
        for c, members in enumerate(self.targets.classes):
            for i in members:
                self.flat_class[i] = c
        self.num_classes = len(self.targets.classes)

        r_sec = m - k + 1
        self.sections: Optional[FlatSystem] = flat_system("right", m, n, field, r_sec) if r_sec < m else None
        self.inner: List[List[int]] = []
        if self.sections is not None:
            for hm in self.sections.masks:
                self.inner.append([fm for fm in self.masks if fm & hm == fm])

        if seed is None:
            self.rank = list(range(self.num_points))
        else:
            order = np.random.default_rng(seed).permutation(self.num_points)
            self.rank = [0] * self.num_points
            for pos, p in enumerate(order):
                self.rank[int(p)] = pos
        self._hit_memo: Dict[Tuple[int, ...], float] = {}
        self._section_memo: Dict[Tuple[int, int, int], float] = {}

    # Bounds

    def _min_hitting(self, lines: Tuple[int, ...]) -> float:
        """Exact minimum number of points hitting every (restricted) line mask."""
        if not lines:
            return 0
        cached = self._hit_memo.get(lines)
        if cached is not None:
            return cached
        pivot = min(lines, key=int.bit_count)
        best = INFEASIBLE
        excluded = 0
        for p in _bits(pivot):
            bit = 1 << p
            rest = {line & ~excluded for line in lines if not line & bit}
            excluded |= bit
            if 0 in rest:
                continue
            best = min(best, 1 + self._min_hitting(tuple(sorted(rest))))
        if len(self._hit_memo) > MEMO_LIMIT:
            self._hit_memo.clear()
        self._hit_memo[lines] = best
        return best

    def _section_completion(self, h: int, inc: int, avail: int) -> float:
        key = (h, inc, avail)
        cached = self._section_memo.get(key)
        if cached is not None:
            return cached
        lines = set()
        for fm in self.inner[h]:
            if not fm & inc:
                lines.add(fm & avail)
        value = INFEASIBLE if 0 in lines else self._min_hitting(tuple(sorted(lines)))
        if len(self._section_memo) > MEMO_LIMIT:
            self._section_memo.clear()
        self._section_memo[key] = value
        return value

    def _bound(self, include: int, avail: int, unblocked: Sequence[int], floor: int, remaining: int) -> float:
        """Lower bound on points still needed, INFEASIBLE if none suffices."""
        restricted = [self.masks[i] & avail for i in unblocked]
        if 0 in restricted:
            return INFEASIBLE

        counts = [0] * self.num_classes
        for i in unblocked:
            counts[self.flat_class[i]] += 1
        lb = max(counts)
        if lb > remaining:
            return lb

        used = packing = 0
        for r in sorted(restricted, key=int.bit_count):
            if not r & used:
                used |= r
                packing += 1
        lb = max(lb, packing)
        if lb > remaining:
            return lb

        degree: Dict[int, int] = {}
        for r in restricted:
            for p in _bits(r):
                degree[p] = degree.get(p, 0) + 1
        covered = needed = 0
        for d in sorted(degree.values(), reverse=True):
            if covered >= len(restricted):
                break
            covered += d
            needed += 1
        lb = max(lb, needed)
        if lb > remaining or self.sections is None:
            return lb

        need: List[float] = []
        for h, hm in enumerate(self.sections.masks):
            inc_h, av_h = include & hm, avail & hm
            have = inc_h.bit_count()
            if floor and have + av_h.bit_count() < floor:
                return INFEASIBLE
            completion = self._section_completion(h, inc_h, av_h)
            if completion == INFEASIBLE:
                return INFEASIBLE
            need.append(max(completion, floor - have))
        for members in self.sections.classes:
            lb = max(lb, sum(need[h] for h in members))
            if lb > remaining:
                return lb

        for h, hm in enumerate(self.sections.masks):
            if need[h] + len(restricted) <= lb:
                continue
            used = packing = 0
            for r in sorted(restricted, key=int.bit_count):
                if not r & hm and not r & used:
                    used |= r
                    packing += 1
            lb = max(lb, need[h] + packing)
            if lb > remaining:
                return lb
        return lb

    def lower_bound(self, include: int = 0, exclude: int = 0, floor: int = 0) -> int:
        avail = self.full & ~(include | exclude)
        unblocked = [i for i, fm in enumerate(self.masks) if not fm & include]
        if not unblocked:
            return 0
        value = self._bound(include, avail, unblocked, floor, len(self.masks) + self.num_points)
        if value == INFEASIBLE:
            raise InternalConsistencyError("root of the search is infeasible")
        return int(value)

    def greedy(self) -> int:
        """A blocking set by repeatedly taking the point on most unblocked flats."""
        include = 0
        while True:
            unblocked = [fm for fm in self.masks if not fm & include]
            if not unblocked:
                return include
            degree = [0] * self.num_points
            for fm in unblocked:
                for p in _bits(fm):
                    degree[p] += 1
            best = max(range(self.num_points), key=lambda p: (degree[p], -p))
            include |= 1 << best

    # Branching

    def branch_points(self, include: int, exclude: int) -> Optional[List[int]]:
        """Points of the first unblocked flat, in exploration order; None when everything is blocked."""
        avail = self.full & ~(include | exclude)
        for fm in self.masks:
            if not fm & include:
                return sorted(_bits(fm & avail), key=self.rank.__getitem__)
        return None

    def dfs(self, include: int, exclude: int, s: int, floor: int, budget: _Budget) -> Optional[int]:
        budget.tick()
        count = include.bit_count()
        if count > s:
            return None
        unblocked = [i for i, fm in enumerate(self.masks) if not fm & include]
        if not unblocked:
            return include
        if count >= s:
            return None
        avail = self.full & ~(include | exclude)
        if count + self._bound(include, avail, unblocked, floor, s - count) > s:
            return None
        for p in self.branch_points(include, exclude):
            bit = 1 << p
            found = self.dfs(include | bit, exclude, s, floor, budget)
            if found is not None:
                return found
            exclude |= bit
        return None

    def expand(self, task: Task) -> List[Task]:
        """Children of a task in the order ``dfs`` visits them."""
        include, exclude, floor = task
        points = self.branch_points(include, exclude)
        if points is None:
            return [task]
        children = []
        for p in points:
            children.append((include | 1 << p, exclude, floor))
            exclude |= 1 << p
        return children

    # Symmetry

    def section_stabilizer(self, cap: int) -> Optional[List[List[int]]]:
        """
        Point permutations of X -> UXW + C fixing the first section H1
        (U V0 = V0, W invertible, C in H1), or None above ``cap``.
        """
        if self.sections is None:
            return None
        f, m, n = self.field, self.m, self.n
        H1 = self.sections.flats[0]
        V0 = H1.direction
        try:
            gl_m = list(enumerate_matrices(m, m, f, "full_rank"))
            gl_n = list(enumerate_matrices(n, n, f, "full_rank"))
        except EnumerationTooLarge:
            return None
        V0_set = set(span(V0, f, m))
        Us = [U for U in gl_m
              if all(tuple(matmul(U, Mat.from_columns(f, [v])).col(0)) in V0_set for v in V0)]
        translations = list(_bits(self.sections.masks[0]))
        order = len(Us) * len(gl_n) * len(translations)
        if order > cap:
            logger.warning(f"Section stabiliser of order {order} exceeds the symmetry cap {cap}")
            return None

        points = list(enumerate_matrices(m, n, f))
        add = _point_add(f, m, n)
        perms = []
        for U in Us:
            for W in gl_n:
                base = [matmul(matmul(U, X), W).index for X in points]
                for c in translations:
                    perms.append([add(b, c) for b in base])
        logger.debug(f"Section stabiliser of order {len(perms)}")
        return perms


def _is_lex_min(points: Tuple[int, ...], perms: List[List[int]]) -> bool:
    for perm in perms:
        if tuple(sorted(perm[p] for p in points)) < points:
            return False
    return True


# Worker plumbing

_WORKER_CACHE: Dict[tuple, DenseSetSearch] = {}


def _search_for(m: int, n: int, k: int, field_key: tuple, seed: Optional[int]) -> DenseSetSearch:
    key = (m, n, k, field_key, seed)
    if key not in _WORKER_CACHE:
        _WORKER_CACHE[key] = DenseSetSearch(m, n, k, field_make(*field_key), seed)
    return _WORKER_CACHE[key]


def _run_task(payload: dict, task: Task) -> Tuple[Optional[int], int, bool]:
    """Solve one subproblem; returns (witness mask or None, nodes, exhausted)."""
    search = _search_for(payload["m"], payload["n"], payload["k"], payload["field"], payload["seed"])
    budget = _Budget(payload["node_budget"], payload["deadline"])
    include, exclude, floor = task
    try:
        found = search.dfs(include, exclude, payload["s"], floor, budget)
        return found, budget.nodes, False
    except _BudgetHit:
        return None, budget.nodes, True


class _TaskLedger:
    """
    Charges task outcomes against one node budget in task order.

    A task that finished within ``n`` nodes under a larger budget finishes
    the same way under any budget >= n, so outcomes computed with the full
    budget replay to exactly what a sequential run would report.
    """

    def __init__(self, limit: int):
        self.limit = limit
        self.nodes = 0
        self.exhausted = False
        self.witness: Optional[int] = None

    def record(self, found: Optional[int], used: int, hit: bool) -> bool:
        """Charge one task; True once the decision is settled."""
        if hit or used > self.limit:
            self.nodes += min(used, self.limit + 1)
            self.exhausted = True
            return True
        self.nodes += used
        self.limit = max(self.limit - used, 1)
        if found is not None:
            self.witness = found
            return True
        return False


@dataclass
class Decision:
    feasible: bool
    witness: Optional[int]
    nodes: int
    exhausted: bool


class DenseSetSolver:
    """Drives decide/minimum runs for one SearchConfig."""

    def __init__(self, cfg: SearchConfig, field: Optional[FieldSpec] = None):
        self.cfg = cfg
        self.field = field or field_from_order(cfg.q, cfg.poly)
        config = get_config()
        self.search = DenseSetSearch(cfg.m, cfg.n, cfg.k, self.field, cfg.seed)
        _WORKER_CACHE[(cfg.m, cfg.n, cfg.k, self.field.key, cfg.seed)] = self.search
        self.deadline = time.time() + cfg.time_budget
        self.nodes_left = cfg.node_budget

        self.mode = "none"
        self.perms: Optional[List[List[int]]] = None
        if cfg.symmetry:
            self.perms = self.search.section_stabilizer(config.symmetry_group_cap)
            self.mode = "section-first" if self.perms is not None else "translation"
            if self.mode == "translation" and self.search.sections is not None:
                logger.warning("Falling back to translation normalisation only")
        else:
            logger.warning("Symmetry reduction disabled; searching the full space")

    def _section_tasks(self, s: int) -> List[Task]:
        search = self.search
        sections = search.sections
        h1_mask = sections.masks[0]
        h1_points = tuple(_bits(h1_mask))
        class_size = len(sections.classes[0])
        inner = search.inner[0]
        tasks = []
        for t in range(1, s // class_size + 1):
            check_enumeration(math.comb(len(h1_points), t), None, f"{t}-subsets of the first section")
            for subset in combinations(h1_points, t):
                mask = 0
                for p in subset:
                    mask |= 1 << p
                if any(not fm & mask for fm in inner):
                    continue
                if not _is_lex_min(subset, self.perms):
                    continue
                tasks.append((mask, h1_mask & ~mask, t))
        logger.debug(f"decide({s}): {len(tasks)} canonical first sections")
        return tasks

    def _tasks(self, s: int) -> List[Task]:
        if self.mode == "section-first":
            tasks = self._section_tasks(s)
        elif self.mode == "translation":
            tasks = [(1, 0, 0)]
        else:
            tasks = [(0, 0, 0)]
        rounds = 0
        while 0 < len(tasks) < SPLIT_TASKS and rounds < 3:
            tasks = [child for task in tasks for child in self.search.expand(task)]
            rounds += 1
        return tasks

    def decide(self, s: int) -> Decision:
        """Is there a k-dense set of size <= s?"""
        tasks = self._tasks(s)
        payload = {
            "m": self.cfg.m, "n": self.cfg.n, "k": self.cfg.k, "field": self.field.key,
            "seed": self.cfg.seed, "s": s, "node_budget": max(self.nodes_left, 1), "deadline": self.deadline,
        }
        ledger = _TaskLedger(payload["node_budget"])
        if self.cfg.threads > 1 and len(tasks) > 1:
            # every task gets the whole budget; the ledger then charges them in task order
            with mp.Pool(self.cfg.threads) as pool:
                for outcome in pool.imap(partial(_run_task, payload), tasks):
                    if ledger.record(*outcome):
                        break
        else:
            for task in tasks:
                if ledger.record(*_run_task({**payload, "node_budget": ledger.limit}, task)):
                    break
        nodes, exhausted, witness = ledger.nodes, ledger.exhausted, ledger.witness
        self.nodes_left -= nodes
        feasible = witness is not None
        logger.info(f"decide({s}) for nu_{self.cfg.k}({self.cfg.m},{self.cfg.n},{self.field.q}): "
                    f"{'feasible' if feasible else 'infeasible'}{' (budget hit)' if exhausted and not feasible else ''}, "
                    f"{nodes} nodes")
        return Decision(feasible, witness, nodes, exhausted and not feasible)

    def _result(self, **fields) -> SearchResult:
        witness = fields.pop("witness_mask", None)
        result = SearchResult(
            m=self.cfg.m, n=self.cfg.n, q=self.field.q, k=self.cfg.k,
            target=self.cfg.target, symmetry=self.mode, **fields,
        )
        if witness is not None:
            points = PointSet.from_mask(self.field, self.cfg.m, self.cfg.n, witness)
            _verify_witness(points, self.cfg.k)
            result.witness = [X.to_lists() for X in points]
            result.witness_indices = list(points.indices)
        return result

    def run(self) -> SearchResult:
        start = time.time()
        cfg = self.cfg
        lower = self.search.lower_bound()
        best = self.search.greedy()
        nodes = 0

        if cfg.target == "decide":
            decision = self.decide(cfg.decide_size)
            nodes += decision.nodes
            result = self._result(
                decide_size=cfg.decide_size, feasible=decision.feasible if not decision.exhausted else None,
                lower_bound=lower, nodes=nodes, seconds=time.time() - start,
                proof=not decision.exhausted, witness_mask=decision.witness,
            )
            if decision.exhausted:
                raise BudgetExhausted(f"decide({cfg.decide_size}) ran out of budget", result=result)
            return result

        for s in range(lower, best.bit_count()):
            decision = self.decide(s)
            nodes += decision.nodes
            if decision.feasible:
                best = decision.witness
                break
            if decision.exhausted:
                result = self._result(
                    minimum=best.bit_count(), lower_bound=s, nodes=nodes,
                    seconds=time.time() - start, proof=False, witness_mask=best,
                )
                raise BudgetExhausted(f"search stopped while deciding size {s}", result=result)
            lower = s + 1
        minimum = best.bit_count()
        logger.info(f"nu_{cfg.k}({cfg.m},{cfg.n},{self.field.q}) = {minimum} ({nodes} nodes, symmetry {self.mode})")
        return self._result(
            minimum=minimum, lower_bound=minimum, nodes=nodes,
            seconds=time.time() - start, proof=True, witness_mask=best,
        )


def _verify_witness(points: PointSet, k: int):
    for j in range(1, k + 1):
        if not is_k_dense(points, j):
            raise InternalConsistencyError(f"search witness is not {j}-dense")


def min_dense_size(cfg: SearchConfig, field: Optional[FieldSpec] = None) -> SearchResult:
    """
    Minimum size of a k-dense set (or a decision for ``decide_size``).

    Raises:
        BudgetExhausted: carries the best-so-far SearchResult with proof=False
    """
    return DenseSetSolver(cfg, field).run()


# MRD subsets

def _mrd_graph(S: PointSet, k: int) -> Tuple[nx.Graph, int, int]:
    d = min(S.m, S.n) - k + 1
    graph = nx.Graph()
    graph.add_nodes_from(range(len(S)))
    for i, j in combinations(range(len(S)), 2):
        if rank(matsub(S.points[i], S.points[j])) >= d:
            graph.add_edge(i, j)
    return graph, d, S.field.q ** (k * max(S.m, S.n))


def all_mrd_subsets(S: PointSet, k: int, budget: Optional[int] = None) -> List[MatrixCode]:
    """Every (m,n,k) MRD code contained in S, in canonical order."""
    if not 1 <= k <= min(S.m, S.n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(S.m, S.n)}")
    graph, _, target = _mrd_graph(S, k)
    budget = budget or get_config().enumeration_cap
    found = set()
    visited = 0
    for clique in nx.find_cliques(graph):
        visited += 1
        if visited > budget:
            raise BudgetExhausted(f"clique enumeration exceeded {budget} cliques")
        if len(clique) >= target:
            for subset in combinations(sorted(clique), target):
                found.add(subset)
    return [MatrixCode(S.points[i] for i in subset) for subset in sorted(found)]


def find_mrd_subset(S: PointSet, k: int, budget: Optional[int] = None) -> Optional[MatrixCode]:
    """
    An MRD code inside S (canonically first), or None.

    Any q^{k max(m,n)} points at pairwise rank distance >= min(m,n)-k+1 form
    an MRD code, so this is a clique search.
    """
    if not 1 <= k <= min(S.m, S.n):
        raise ParameterOutOfRange(f"k={k} outside 1..{min(S.m, S.n)}")
    if len(S) < S.field.q ** (k * max(S.m, S.n)):
        return None
    codes = all_mrd_subsets(S, k, budget)
    if not codes:
        return None
    code = codes[0]
    if not is_mrd(code, k):
        raise InternalConsistencyError("clique of the distance graph is not MRD")
    return code


# Small exhaustive checks

def enumerate_blocking_sets(system: FlatSystem, size: int) -> List[int]:
    """All point masks of the given size blocking every flat of ``system``."""
    check_enumeration(math.comb(system.num_points, size), None, f"{size}-subsets of {system.num_points} points")
    found = []
    for subset in combinations(range(system.num_points), size):
        mask = 0
        for p in subset:
            mask |= 1 << p
        if system.first_unblocked(mask) is None:
            found.append(mask)
    return found


def verify_plane_lemma() -> dict:
    """
    Blocking sets of the 12 lines of RAG(2,2,GF(2)):
    size 5 contains an MRD code and misses another, size 6 misses an MRD
    code, sizes 7 and 8 leave 3 mutually non-collinear points outside.
    """
    f = field_make(2)
    system = flat_system("right", 2, 2, f, 1)
    full = PointSet(enumerate_matrices(2, 2, f))
    codes = [PointSet(code.codewords).mask for code in all_mrd_subsets(full, 1)]
    P = full.points

    def far(a: int, b: int) -> bool:
        return rank(matsub(P[a], P[b])) == 2

    def noncollinear_triple(mask: int) -> bool:
        outside = [p for p in range(len(P)) if not mask >> p & 1]
        return any(far(a, b) and far(a, c) and far(b, c) for a, b, c in combinations(outside, 3))

    report = {"mrd_codes": len(codes)}
    for size in (5, 6, 7, 8):
        sets = enumerate_blocking_sets(system, size)
        if size == 5:
            holds = all(any(c & S == c for c in codes) and any(not c & S for c in codes) for S in sets)
        elif size == 6:
            holds = all(any(not c & S for c in codes) for S in sets)
        else:
            holds = all(noncollinear_triple(S) for S in sets)
        report[size] = {"blocking_sets": len(sets), "holds": holds}
    report["holds"] = all(report[size]["holds"] for size in (5, 6, 7, 8))
    return report


def dense_sets_of_minimum_size(m: int, n: int, k: int, field: FieldSpec) -> dict:
    """
    For m <= n: all k-dense sets of size q^{kn} by exhaustion, and whether
    each is an MRD code.
    """
    if m > n:
        raise ParameterOutOfRange(f"need m <= n, got {m}x{n}")
    system = flat_system("right", m, n, field, m - k)
    size = field.q ** (k * n)
    masks = enumerate_blocking_sets(system, size)
    all_mrd = all(is_mrd(MatrixCode(PointSet.from_mask(field, m, n, mask).points), k) for mask in masks)
    return {"size": size, "dense_sets": len(masks), "all_mrd": all_mrd}
