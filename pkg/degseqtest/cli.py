"""
Command line interface: `degseqtest [global flags] <subcommand> [options]`.

Subcommands gen, repair, estimate and test work on single instances and
print JSON; exp-scaling, exp-estimator, exp-tester and calibrate-c run the
Monte-Carlo experiments. The test subcommand exits with 0 on accept and 1 on
reject; any error exits with 2.
"""
import argparse
import json
import logging
import sys
import typing

import numpy as np

from degseqtest.degreeseq import read_degree_sequence, write_degree_sequence
from degseqtest.estimator import estimate_statistic
from degseqtest.graphcore import edit_distance, read_edge_list, write_edge_list
from degseqtest.harness import (
    INSTANCE_FAMILIES,
    SAFETY_FACTOR,
    ExperimentSpec,
    calibrate_c,
    exp_estimator,
    exp_scaling,
    exp_tester,
    gen_instance,
    write_table,
)
from degseqtest.oracle import AdjacencyOracle
from degseqtest.repair import DEFAULT_C_CONST, check_edit_bound, repair
from degseqtest.tester import ProximityConfig, property_from_spec, run_tester


def _emit(payload: dict, args: argparse.Namespace) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.output:
        with open(file=args.output, mode="w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _emit_table(df, args: argparse.Namespace) -> None:
    # experiments write their own tables when given an output path
    if not args.output:
        write_table(df, sys.stdout, fmt=args.format)


def _gen(args: argparse.Namespace) -> int:
    graph, target = gen_instance(args.family, args.n, args.delta, seed=args.seed)
    write_edge_list(graph, args.graph)
    write_degree_sequence(target, args.target)
    logging.info(f"gen: wrote {graph} to {args.graph} and its target to {args.target}")
    return 0


def _repair(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.graph)
    target = read_degree_sequence(args.target)
    result = repair(graph, target, greedy_init=args.greedy_init, seed=args.seed)
    if args.repaired:
        write_edge_list(result.repaired, args.repaired)
    payload = result.to_dict()
    payload["c_const"] = args.c_const
    payload["bound_ok"] = check_edit_bound(result, graph.n, args.c_const)
    payload["edit_distance"] = edit_distance(graph, result.repaired)[1]
    _emit(payload, args)
    return 0


def _estimate(args: argparse.Namespace) -> int:
    oracle = AdjacencyOracle(read_edge_list(args.graph))
    statistic, queries = estimate_statistic(oracle, args.delta, np.random.default_rng(args.seed))
    _emit({"statistic": statistic.to_dict(), "queries": queries, "delta": args.delta}, args)
    return 0


def _test(args: argparse.Namespace) -> int:
    oracle = AdjacencyOracle(read_edge_list(args.graph))
    try:
        spec = json.loads(args.property)
    except json.JSONDecodeError as error:
        raise ValueError(f"--property is not valid JSON: {error}") from error
    cfg = ProximityConfig(
        epsilon=args.epsilon,
        c_const=args.c_const,
        seed=args.seed,
        delta_override=args.delta_override,
        repeat=args.repeat,
        max_queries=args.max_queries,
    )
    verdict = run_tester(oracle, property_from_spec(spec), cfg)
    _emit(verdict.to_dict(), args)
    return 0 if verdict.accept else 1


def _experiment_spec(
    experiment: str, args: argparse.Namespace, write: bool = True
) -> ExperimentSpec:
    return ExperimentSpec.from_catalog(
        experiment,
        families=args.families,
        cases=getattr(args, "cases", None),
        n=args.n,
        deltas=args.deltas,
        trials=args.trials,
        seed=args.seed,
        output=args.output if write else None,
        fmt=args.format,
        c_const=getattr(args, "c_const", None),
    )


def _exp_scaling(args: argparse.Namespace) -> int:
    trials, summary = exp_scaling(_experiment_spec("exp_scaling", args))
    _emit_table(trials, args)
    if args.summary:
        write_table(summary, args.summary, fmt=args.format)
    return 0


def _exp_estimator(args: argparse.Namespace) -> int:
    _emit_table(exp_estimator(_experiment_spec("exp_estimator", args)), args)
    return 0


def _exp_tester(args: argparse.Namespace) -> int:
    _emit_table(exp_tester(_experiment_spec("exp_tester", args)), args)
    return 0


def _calibrate_c(args: argparse.Namespace) -> int:
    spec = _experiment_spec("exp_scaling", args, write=False)
    c_const = calibrate_c(spec, safety_factor=args.safety_factor)
    _emit({"c_const": c_const, "safety_factor": args.safety_factor, "seed": spec.seed}, args)
    return 0


def _add_grid_options(parser: argparse.ArgumentParser, cases: bool = False) -> None:
    if cases:
        parser.add_argument("--cases", nargs="+", help="tester cases (default from catalog)")
    parser.add_argument("--families", nargs="+", help="families (default from catalog)")
    parser.add_argument("--n", type=int, nargs="+", help="graph sizes")
    parser.add_argument("--deltas", type=float, nargs="+", help="delta grid")
    parser.add_argument("--trials", type=int, help="trials per grid cell")


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    """
    Flags accepted both before and after the subcommand. The subcommand
    copies default to SUPPRESS so they never overwrite a value given first.
    """
    parser = argparse.ArgumentParser(add_help=False)

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(0), help="random seed (default: 0)")
    parser.add_argument("--output", default=default(None), help="output path (default: stdout)")
    parser.add_argument(
        "--format", choices=["csv", "json"], default=default("csv"), help="table format"
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=default(0), help="-v info, -vv debug"
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degseqtest",
        description="Degree-sequence repair and property testing",
        parents=[_global_options(suppress=False)],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    shared = [_global_options(suppress=True)]

    gen = subparsers.add_parser(
        "gen", parents=shared, help="generate a (graph, target sequence) instance"
    )
    gen.add_argument("--family", choices=INSTANCE_FAMILIES, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--delta", type=float, required=True, help="target discrepancy / n^2")
    gen.add_argument("--graph", required=True, help="edge list to write")
    gen.add_argument("--target", required=True, help="degree sequence to write")
    gen.set_defaults(handler=_gen)

    rep = subparsers.add_parser(
        "repair", parents=shared, help="repair a graph to a target degree sequence"
    )
    rep.add_argument("--graph", required=True, help="edge list file")
    rep.add_argument("--target", required=True, help="degree sequence file")
    rep.add_argument("--c-const", type=float, default=DEFAULT_C_CONST)
    rep.add_argument("--greedy-init", action="store_true")
    rep.add_argument("--repaired", help="also write the repaired graph's edge list here")
    rep.set_defaults(handler=_repair)

    est = subparsers.add_parser(
        "estimate", parents=shared, help="estimate the degree statistic of a graph"
    )
    est.add_argument("--graph", required=True)
    est.add_argument("--delta", type=float, required=True)
    est.set_defaults(handler=_estimate)

    tst = subparsers.add_parser(
        "test", parents=shared, help="test a degree-sequence property"
    )
    tst.add_argument("--graph", required=True)
    tst.add_argument("--property", required=True, help='JSON, e.g. {"type": "any_regular"}')
    tst.add_argument("--epsilon", type=float, required=True)
    tst.add_argument("--c-const", type=float, default=DEFAULT_C_CONST)
    tst.add_argument("--delta-override", type=float)
    tst.add_argument("--repeat", type=int, default=1, help="majority over repeated runs")
    tst.add_argument("--max-queries", type=int)
    tst.set_defaults(handler=_test)

    scaling = subparsers.add_parser(
        "exp-scaling", parents=shared, help="edit distance vs discrepancy"
    )
    _add_grid_options(scaling)
    scaling.add_argument("--c-const", type=float)
    scaling.add_argument("--summary", help="also write the per-(family, n) summary here")
    scaling.set_defaults(handler=_exp_scaling)

    estimator = subparsers.add_parser(
        "exp-estimator", parents=shared, help="estimator success rates"
    )
    _add_grid_options(estimator)
    estimator.set_defaults(handler=_exp_estimator)

    tester = subparsers.add_parser(
        "exp-tester", parents=shared, help="tester accept/reject rates"
    )
    _add_grid_options(tester, cases=True)
    tester.set_defaults(handler=_exp_tester)

    calibrate = subparsers.add_parser(
        "calibrate-c", parents=shared, help="calibrate the edit-distance constant"
    )
    _add_grid_options(calibrate)
    calibrate.add_argument("--safety-factor", type=float, default=SAFETY_FACTOR)
    calibrate.set_defaults(handler=_calibrate_c)
    return parser


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")
    try:
        return args.handler(args)
    except (ValueError, IndexError, NotImplementedError, OSError) as error:
        logging.error(f"{args.command}: {error}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
