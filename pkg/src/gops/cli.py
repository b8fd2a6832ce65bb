"""Command-line surface tying the solvers together.

Exit codes: 0 success, 1 infeasible / no solution / failed bound,
2 input or usage error, 3 node or time limit reached.
"""

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .bmgop import BmgopInstance, bmgop_compute, build_bmgop_ip, solve_bmgop_exact, solve_bmgop_ip
from .encodings import CoverProblem, MonotoneCnf, encode_max_k_cover, encode_monsat, encode_set_cover
from .errors import BoundViolationError, GopsError, LimitReachedError, ParseError
from .gbgop import (GbgopInstance, build_gbgop_ip, count_gbgop_solutions,
                    reduce_to_r_star, restricted_pairs, solve_gbgop_exact,
                    solve_gbgop_ip)
from .ip import Limits, emit_lp
from .scenarios import gen_campaign, gen_random
from .serialize import (parse_instance, report_for_bmgop, report_for_gbgop,
                        serialize_instance)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


def _read_instance(path: str):
    return parse_instance(Path(path).read_text())


def _limits(args) -> Limits:
    return Limits(max_nodes=args.max_nodes, max_seconds=args.max_seconds)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text, end="")


def _cmd_validate(args) -> int:
    inst = _read_instance(args.file)
    kind = "gbgop" if isinstance(inst, GbgopInstance) else "bmgop"
    _emit(args, {"ok": True, "problem": kind}, f"ok: {kind} instance\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = _read_instance(args.file)
    trace_path = args.trace
    if isinstance(inst, GbgopInstance):
        if args.method == "approx":
            print("error[method]: no approximation method for goal-based instances",
                  file=sys.stderr)
            return EXIT_INPUT
        if args.method == "exact":
            sol = solve_gbgop_exact(inst, limits=_limits(args))
            status = "optimal" if sol is not None else "infeasible"
        else:
            sol, status = solve_gbgop_ip(inst, limits=_limits(args))
        report = report_for_gbgop(args.method, status, sol, inst)
    else:
        if args.method == "approx":
            sol, trace = bmgop_compute(inst, delta=args.delta, condition_mode=args.condition)
            if trace_path:
                Path(trace_path).write_text(trace.to_text())
            report = report_for_bmgop("approx", "feasible", sol, inst, trace_path=trace_path)
        elif args.method == "exact":
            sol = solve_bmgop_exact(inst, limits=_limits(args))
            report = report_for_bmgop("exact", "optimal", sol, inst)
        else:
            sol, status = solve_bmgop_ip(inst, limits=_limits(args))
            report = report_for_bmgop("ip", status, sol, inst)
    _emit(args, report.to_json(), report.to_text())
    if report.status == "infeasible":
        return EXIT_INFEASIBLE
    if report.status == "limit_reached":
        return EXIT_LIMIT
    return EXIT_OK


def _cmd_reduce(args) -> int:
    inst = _read_instance(args.file)
    if not isinstance(inst, GbgopInstance):
        print("error[method]: the reduction is defined for goal-based instances",
              file=sys.stderr)
        return EXIT_INPUT
    r = restricted_pairs(inst)
    r_star, stats = reduce_to_r_star(inst)
    payload = {"r_size": stats.r_size, "r_star_size": stats.r_star_size,
               "members": [[p.action, [p.point.x, p.point.y]] for p in r_star]}
    text = [f"|R| = {stats.r_size}, |R*| = {stats.r_star_size}"]
    text += [str(p) for p in r_star]
    _emit(args, payload, "\n".join(text) + "\n")
    return EXIT_OK


def _cmd_emit_lp(args) -> int:
    inst = _read_instance(args.file)
    if isinstance(inst, GbgopInstance):
        model = build_gbgop_ip(inst, use_reduction=args.reduced)
    else:
        model = build_bmgop_ip(inst)
    Path(args.output).write_text(emit_lp(model))
    return EXIT_OK


def _cmd_count(args) -> int:
    inst = _read_instance(args.file)
    if not isinstance(inst, GbgopInstance):
        print("error[method]: counting is defined for goal-based instances", file=sys.stderr)
        return EXIT_INPUT
    count = count_gbgop_solutions(inst, cap=args.cap)
    _emit(args, {"count": count}, f"{count}\n")
    return EXIT_OK


def _cmd_encode(args) -> int:
    doc = json.loads(Path(args.file).read_text())
    if not isinstance(doc, dict):
        raise ParseError("type", "expected an object", "$")
    try:
        if args.kind == "monsat":
            problem = MonotoneCnf(atoms=tuple(doc["atoms"]),
                                  clauses=tuple(frozenset(c) for c in doc["clauses"]))
            inst = encode_monsat(problem)
        else:
            problem = CoverProblem(universe=tuple(doc["universe"]),
                                   families=tuple(frozenset(f) for f in doc["families"]),
                                   k=doc.get("k"))
            inst = encode_set_cover(problem) if args.kind == "set-cover" else encode_max_k_cover(problem)
    except (KeyError, TypeError) as err:
        raise ParseError("encode-input", f"malformed problem file: {err}") from err
    Path(args.output).write_text(serialize_instance(inst))
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "campaign":
        scenario = gen_campaign()
        inst = scenario.gbgop if args.variant == "gbgop" else scenario.bmgop
    else:
        inst = gen_random(seed=args.seed, width=args.width, height=args.height,
                          predicates=args.predicates, actions=args.actions,
                          radius=args.radius, ics=args.ics, problem=args.problem)
    Path(args.output).write_text(serialize_instance(inst))
    return EXIT_OK


def _cmd_bench(args) -> int:
    paths = sorted(Path(args.directory).glob("*.json"))
    suite = []
    for path in paths:
        inst = parse_instance(path.read_text())
        if not isinstance(inst, BmgopInstance):
            print(f"error[method]: {path.name} is not a benefit-maximizing instance",
                  file=sys.stderr)
            return EXIT_INPUT
        suite.append((path.name, inst))
    try:
        report = bench_mod.run_bench(suite, delta=args.delta, limits=_limits(args))
    except BoundViolationError as err:
        if args.output:
            Path(args.output).write_text(json.dumps(err.report.to_json(), indent=2) + "\n")
        print(err.report.to_text(), end="")
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.output:
        Path(args.output).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.to_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gops",
        description="Exact and approximate solvers for action placement on discrete maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--max-nodes", type=int, default=None)
    limits.add_argument("--max-seconds", type=float, default=None)

    p = sub.add_parser("validate", parents=[common], help="parse and check an instance file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("solve", parents=[common, limits], help="solve an instance")
    p.add_argument("file")
    p.add_argument("--method", choices=("exact", "ip", "approx"), default="exact")
    p.add_argument("--delta", type=float, default=0.001)
    p.add_argument("--condition", choices=("weighted", "plain"), default="weighted")
    p.add_argument("--trace", default=None, help="write the greedy trace to this file")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("reduce", parents=[common],
                       help="show the admissible pair set and its reduction")
    p.add_argument("file")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("emit-lp", parents=[common], help="write the instance's program as LP text")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reduced", action="store_true",
                   help="build the goal-based program over the reduced pair set")
    p.set_defaults(func=_cmd_emit_lp)

    p = sub.add_parser("count", parents=[common, limits], help="count all solutions (guarded)")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("encode", parents=[common],
                       help="encode a classical problem file as an instance")
    p.add_argument("kind", choices=("set-cover", "max-k-cover", "monsat"))
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("gen", parents=[common], help="generate a scenario instance")
    p.add_argument("kind", choices=("campaign", "random"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--variant", choices=("gbgop", "bmgop"), default="bmgop",
                   help="campaign flavor to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=1)
    p.add_argument("--height", type=int, default=1)
    p.add_argument("--predicates", type=int, default=3)
    p.add_argument("--actions", type=int, default=3)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--ics", type=int, default=1)
    p.add_argument("--problem", choices=("gbgop", "bmgop"), default="gbgop")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", parents=[common, limits],
                       help="compare exact and greedy over a directory of instances")
    p.add_argument("directory")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--delta", type=float, default=0.001)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INPUT if err.code else EXIT_OK
    try:
        return args.func(args)
    except LimitReachedError as err:
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, GopsError) as err:
        print(f"error[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as err:
        print(f"error[no-such-file]: {err}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as err:
        print(f"error[bad-json]: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
