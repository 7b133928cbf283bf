# src/main.py
"""
Main CLI entry point for mrdlab.

Usage:
    python -m src.main geom stats --m 3 --n 2 --q 2
    python -m src.main search min-dense --m 3 --n 2 --q 2 --k 1
    python -m src.main verify --fast

JSON (or TSV for tables) goes to stdout, logs go to stderr and the log file.
Exit codes: 0 success, 1 computational failure or exhausted budget, 2 usage.
"""

import argparse
import json
import logging
import sys
from typing import Any, List, Optional

import numpy as np
from pydantic import ValidationError

from src.algebra.counting import count_report
from src.algebra.gf import FieldSpec, field_from_order
from src.codes.distributions import classify_min_support, is_k_good, uniform_full_space, uniform_over
from src.codes.homweight import coset_weight_sums, total_weight, weight_table
from src.codes.rank_metric import find_complete_mapping, gabidulin, is_affine_map, is_mrd, map_to_mrd
from src.coding.random_coding import (
    VectorSet,
    all_vectors,
    exact_intersecting_failure,
    f_set_extract,
    intersecting_failure_bound,
    intersecting_failure_estimate,
    joint_law_check,
    nonzero_vectors,
    random_vectors,
    separating_2_1,
    singleton_family,
)
from src.config import Config, load_config
from src.errors import BudgetExhausted, MrdLabError
from src.geometry.flats import PointSet, geometry_stats, intersection_pattern, is_k_dense
from src.geometry.search import min_dense_size
from src.models import SearchConfig, fraction_str
from src.reporting.audit import AuditLogger
from src.reporting.battery import SCOPES, run_battery
from src.reporting.generator import ReportGenerator
from src.tools.textio import (
    read_code,
    read_distribution,
    read_matrices,
    read_vectors,
    write_code,
    write_matrices,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(config: Config):
    """Log to stderr (stdout carries results) and to the configured file."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.log_file:
        handlers.append(logging.FileHandler(config.log_file))
    logging.basicConfig(level=config.log_level, format=LOG_FORMAT, handlers=handlers, force=True)


def emit(payload: Any):
    print(json.dumps(fraction_str(payload), indent=2, sort_keys=False))


def _field(args: argparse.Namespace) -> FieldSpec:
    poly = [int(c) for c in args.poly.split(",")] if args.poly else None
    return field_from_order(args.q, poly)


# count

COUNT_ARITY = {"gaussian": 2, "intersecting": 4, "rank-products": 4, "orbits": 2, "rank": 3}


def cmd_count(args, parser) -> int:
    if len(args.values) != COUNT_ARITY[args.name]:
        parser.error(f"count {args.name} takes {COUNT_ARITY[args.name]} integers")
    emit(count_report(args.name, tuple(args.values), _field(args), brute=not args.no_brute))
    return 0


# code

def cmd_code_gabidulin(args, parser) -> int:
    field = _field(args)
    code = gabidulin(args.m, args.n, args.k, field)
    payload = {"m": args.m, "n": args.n, "q": field.q, "k": args.k, "size": len(code),
               "is_mrd": bool(is_mrd(code, args.k)), "linear": code.is_linear}
    if args.out:
        path, sidecar = write_code(args.out, code, args.k)
        payload.update({"out": str(path), "sidecar": str(sidecar)})
    else:
        payload["codewords"] = [X.to_lists() for X in code]
    emit(payload)
    return 0


def cmd_code_check(args, parser) -> int:
    code = read_code(args.input)
    verdict = is_mrd(code, args.k)
    emit({
        "is_mrd": verdict.is_mrd,
        "size": verdict.size,
        "expected_size": verdict.expected_size,
        "rank_distance": verdict.rank_distance,
        "expected_distance": verdict.expected_distance,
        "witness": [X.to_lists() for X in verdict.witness] if verdict.witness else None,
        "criteria": verdict.criteria,
    })
    return 0


def cmd_code_complete_mapping(args, parser) -> int:
    field = _field(args)
    f = find_complete_mapping(args.m, field, nonaffine=not args.affine)
    code = map_to_mrd(f)
    payload = {"m": args.m, "q": field.q, "affine": is_affine_map(f),
               "table": [list(f(x)) for x in f.vectors()], "is_mrd": bool(is_mrd(code, 1))}
    if args.out:
        write_code(args.out, code, 1)
        payload["out"] = args.out
    emit(payload)
    return 0


# dist

def _load_distribution(args):
    if args.uniform:
        return uniform_over(read_code(args.uniform).codewords)
    if args.input:
        return read_distribution(args.input)
    return None


def cmd_dist_check(args, parser) -> int:
    D = _load_distribution(args)
    if D is None:
        parser.error("one of --uniform or --in is required")
    verdict = is_k_good(D, args.k)
    payload = {"k_good": verdict.is_good, "k": args.k}
    if verdict.witness is not None:
        payload["witness"] = {
            "M": verdict.witness.M.to_lists(),
            "K": verdict.witness.K.to_lists(),
            "probability": verdict.witness.probability,
        }
    emit(payload)
    return 0


def cmd_dist_classify(args, parser) -> int:
    D = _load_distribution(args)
    if D is None:
        parser.error("one of --uniform or --in is required")
    emit(classify_min_support(D, args.k).to_dict())
    return 0


# homweight

def cmd_homweight_table(args, parser) -> int:
    rows = weight_table(args.side, args.m, args.n, _field(args), normalized=not args.raw)
    sys.stdout.write(ReportGenerator().to_tsv(["rank", "weight"], rows))
    return 0


def cmd_homweight_total(args, parser) -> int:
    emit({"side": args.side, "m": args.m, "n": args.n, "total": total_weight(args.side, args.m, args.n, _field(args))})
    return 0


def cmd_homweight_cosets(args, parser) -> int:
    field = _field(args)
    basis = [tuple(int(x) for x in v.split(",")) for v in args.basis]
    sums = coset_weight_sums(args.side, args.m, args.n, field, basis, args.weight_side)
    emit([{"representative": s.representative.to_lists(), "total": s.total, "rank_census": s.rank_census}
          for s in sums])
    return 0


# geom

def _point_set(path: str) -> PointSet:
    _, _, _, matrices = read_matrices(path)
    return PointSet(matrices)


def cmd_geom_stats(args, parser) -> int:
    emit(geometry_stats(args.side, args.m, args.n, _field(args)).to_dict())
    return 0


def cmd_geom_check_dense(args, parser) -> int:
    S = _point_set(args.input)
    verdict = is_k_dense(S, args.k)
    emit({"k_dense": verdict.is_dense, "k": args.k, "size": len(S),
          "unblocked_flat": verdict.witness.to_dict() if verdict.witness else None})
    return 0


def cmd_geom_pattern(args, parser) -> int:
    S = _point_set(args.input)
    emit({"r": args.r, "side": args.side, "histogram": intersection_pattern(S, args.r, args.side)})
    return 0


# search

def cmd_search_min_dense(args, parser, config: Config) -> int:
    field = _field(args)
    try:
        cfg = SearchConfig(
            m=args.m, n=args.n, q=field.q, k=args.k,
            poly=list(field.modulus) if not field.is_prime_field else None,
            target="decide" if args.decide is not None else "minimum",
            decide_size=args.decide,
            symmetry=not args.no_symmetry,
            node_budget=args.budget_nodes or config.search_node_budget,
            time_budget=args.budget_seconds or config.search_time_budget,
            seed=args.order_seed,
            threads=config.threads,
        )
    except ValidationError as e:
        parser.error(str(e.errors()[0]["msg"]))
    try:
        result = min_dense_size(cfg, field)
    except BudgetExhausted as e:
        if e.result is not None:
            emit(e.result.model_dump(mode="json"))
        raise
    if args.out and result.witness_indices:
        write_matrices(args.out, PointSet.from_indices(field, args.m, args.n, result.witness_indices).points)
    emit(result.model_dump(mode="json"))
    return 0


# rc

def cmd_rc_joint_check(args, parser) -> int:
    field = _field(args)
    D = _load_distribution(args)
    if D is None:
        D = uniform_full_space(field, args.m, args.n)
    if args.vectors:
        vectors = read_vectors(args.vectors, field.q)
    else:
        vectors = nonzero_vectors(field, D.m) if args.mode == "linear" else all_vectors(field, D.m)
    if args.mode == "linear":
        U = VectorSet.any_k_independent(field, vectors, args.k)
    else:
        U = VectorSet.cap_condition(field, vectors, args.k)
    emit(joint_law_check(D, U, args.mode, args.k).to_dict())
    return 0


def cmd_rc_intersect(args, parser, config: Config) -> int:
    field = _field(args)
    payload = {"m": args.m, "n": args.n, "q": field.q, "k": args.k}
    if args.bound:
        payload["bound"] = intersecting_failure_bound(args.m, args.n, field.q, args.k)
    else:
        D = _load_distribution(args)
        if D is None:
            D = uniform_full_space(field, args.m, args.n)
        if args.estimate:
            payload["estimate"] = intersecting_failure_estimate(D, args.k, args.trials, config.seed, config.threads)
            payload.update({"trials": args.trials, "seed": config.seed})
        else:
            payload["exact"] = exact_intersecting_failure(D, args.k)
        payload["bound"] = intersecting_failure_bound(args.m, args.n, field.q, args.k)
    emit(payload)
    return 0


def cmd_rc_fset_extract(args, parser, config: Config) -> int:
    field = _field(args)
    family = separating_2_1 if args.family == "separating" else singleton_family(field.q, args.k)
    if args.input:
        vectors = read_vectors(args.input, field.q)
    else:
        rng = np.random.default_rng(config.seed)
        vectors = random_vectors(field, args.n, args.count, rng)
    result = f_set_extract(vectors, family)
    payload = result.to_dict()
    payload.update({"family": family.name, "input_size": len(vectors)})
    emit(payload)
    return 0


# verify

def cmd_verify(args, parser, config: Config) -> int:
    scope = "fast" if args.fast else args.scope
    report = run_battery(scope)
    generator = ReportGenerator(config.output_dir)
    if args.json:
        emit(report.model_dump(mode="json"))
    else:
        sys.stdout.write(generator.report_tsv(report))
    if config.audit_logs_enabled:
        audit = AuditLogger(config.output_dir)
        audit.save_report(report)
        audit.save_summary(report)
        generator.save_report(report)
    return 0 if report.ok else 1


# Parser

def _common_options(suppress: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before and after the subcommand."""
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--q", type=int, default=default(2), help="Field order (default: 2)")
    group.add_argument("--poly", type=str, default=default(None),
                       help="Modulus coefficients, constant first, comma separated")
    group.add_argument("--cap", type=int, default=default(None), help="Enumeration cap in states")
    group.add_argument("--seed", type=int, default=default(None), help="RNG seed (default: config, 0)")
    group.add_argument("--threads", type=int, default=default(None), help="Worker processes")
    group.add_argument("--log-level", type=str, default=default(None),
                       choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options(suppress=True)
    parser = argparse.ArgumentParser(
        prog="mrdlab",
        description="Exact laboratory for rank-metric codes, k-good random matrices and matrix affine geometries",
        parents=[_common_options(suppress=False)],
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    def leaf(group, name: str, handler, help: str, needs_config: bool = False):
        p = group.add_parser(name, help=help, parents=[common])
        p.set_defaults(handler=handler, needs_config=needs_config)
        return p

    def shape(p, k: bool = False, k_required: bool = True):
        p.add_argument("--m", type=int, required=True, help="Rows")
        p.add_argument("--n", type=int, required=True, help="Columns")
        if k:
            p.add_argument("--k", type=int, required=k_required, default=1, help="Goodness / density parameter")

    p = leaf(commands, "count", cmd_count, "closed-form counts with brute-force cross-checks")
    p.add_argument("name", choices=sorted(COUNT_ARITY))
    p.add_argument("values", type=int, nargs="+", help="gaussian: n m; intersecting, rank-products: k l m n; "
                                                        "orbits: m n; rank: m n r")
    p.add_argument("--no-brute", action="store_true", help="Skip the brute-force oracle")

    code = commands.add_parser("code", help="MRD codes").add_subparsers(dest="action", required=True)
    p = leaf(code, "gabidulin", cmd_code_gabidulin, "build a Gabidulin code")
    shape(p, k=True)
    p.add_argument("--out", type=str, help="Write the code (and a JSON sidecar) here")
    p = leaf(code, "check", cmd_code_check, "verify the MRD property of a code file")
    p.add_argument("--in", dest="input", type=str, required=True)
    p.add_argument("--k", type=int, required=True)
    p = leaf(code, "complete-mapping", cmd_code_complete_mapping, "search a complete mapping of GF(q)^m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--affine", action="store_true", help="Accept affine mappings")
    p.add_argument("--out", type=str)

    dist = commands.add_parser("dist", help="distributions").add_subparsers(dest="action", required=True)
    for name, handler, help in (("check", cmd_dist_check, "exact k-goodness test"),
                                ("classify", cmd_dist_classify, "minimum-support classification")):
        p = leaf(dist, name, handler, help)
        p.add_argument("--k", type=int, required=True)
        source = p.add_mutually_exclusive_group()
        source.add_argument("--uniform", type=str, help="Uniform distribution over a code file")
        source.add_argument("--in", dest="input", type=str, help="Distribution file")

    hw = commands.add_parser("homweight", help="homogeneous weights").add_subparsers(dest="action", required=True)
    p = leaf(hw, "table", cmd_homweight_table, "rank -> weight table (TSV)")
    shape(p)
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--raw", action="store_true", help="Unnormalized weights")
    p = leaf(hw, "total", cmd_homweight_total, "total weight")
    shape(p)
    p.add_argument("--side", choices=["left", "right"], required=True)
    p = leaf(hw, "cosets", cmd_homweight_cosets, "weight sums and rank census of submodule cosets")
    shape(p)
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--basis", nargs="*", default=[], help="Basis vectors as comma lists, e.g. 1,0,0")
    p.add_argument("--weight-side", choices=["left", "right"], default=None)

    geom = commands.add_parser("geom", help="matrix affine geometries").add_subparsers(dest="action", required=True)
    p = leaf(geom, "stats", cmd_geom_stats, "point and flat counts")
    shape(p)
    p.add_argument("--side", choices=["left", "right"], default="right")
    p = leaf(geom, "check-dense", cmd_geom_check_dense, "k-density of a point set file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--in", dest="input", type=str, required=True)
    p = leaf(geom, "pattern", cmd_geom_pattern, "intersection histogram with r-flats")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--side", choices=["left", "right"], default="right")
    p.add_argument("--in", dest="input", type=str, required=True)

    search = commands.add_parser("search", help="blocking-set searches").add_subparsers(dest="action", required=True)
    p = leaf(search, "min-dense", cmd_search_min_dense, "minimum k-dense set", needs_config=True)
    shape(p, k=True)
    p.add_argument("--decide", type=int, default=None, help="Only decide whether size <= s is possible")
    p.add_argument("--budget-nodes", type=int, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--order-seed", type=int, default=None, help="Randomize the point exploration order")
    p.add_argument("--out", type=str, help="Write the witness in matrix text format")

    rc = commands.add_parser("rc", help="random coding").add_subparsers(dest="action", required=True)
    p = leaf(rc, "joint-check", cmd_rc_joint_check, "exact joint laws of u_i A (+ v)")
    shape(p, k=True)
    p.add_argument("--mode", choices=["linear", "affine"], default="linear")
    p.add_argument("--vectors", type=str, help="Vector file (default: all nonzero / all vectors)")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--uniform", type=str)
    source.add_argument("--in", dest="input", type=str)
    p = leaf(rc, "intersect", cmd_rc_intersect, "k-wise intersecting failure probability", needs_config=True)
    shape(p, k=True)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--bound", action="store_true")
    how.add_argument("--estimate", action="store_true")
    p.add_argument("--trials", type=int, default=10_000)
    source = p.add_mutually_exclusive_group()
    source.add_argument("--uniform", type=str)
    source.add_argument("--in", dest="input", type=str)
    p = leaf(rc, "fset-extract", cmd_rc_fset_extract, "pattern-set extraction", needs_config=True)
    p.add_argument("--family", choices=["singletons", "separating"], default="singletons")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--in", dest="input", type=str, help="Vector file (default: seeded sample)")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--count", type=int, default=8)

    p = leaf(commands, "verify", cmd_verify, "run the reproduction battery", needs_config=True)
    p.add_argument("--scope", choices=SCOPES, default="all")
    p.add_argument("--fast", action="store_true", help="Same as --scope fast")
    p.add_argument("--json", action="store_true", help="Print the JSON report instead of TSV")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = load_config(
            validate=True,
            enumeration_cap=args.cap,
            seed=args.seed,
            threads=args.threads,
            log_level=args.log_level,
        )
    except (ValueError, ValidationError) as e:
        parser.error(f"invalid configuration: {e}")
    setup_logging(config)

    try:
        if args.needs_config:
            return args.handler(args, parser, config)
        return args.handler(args, parser)
    except MrdLabError as e:
        logger.error(f"{e.code}: {e.message}")
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())
