"""Command-line front end.

Subcommands: ``solve``, ``bench``, ``profile``, ``check-grad``,
``list-problems``. Exit codes are a stable contract: 0 converged / success,
1 failed gradient check, 2 budget exhaustion, 3 numerical failure, 64 usage
errors. Output is plain text (``NO_COLOR`` is honored trivially: nothing is
ever colored).
"""

import argparse
import dataclasses
import os
import sys

from . import bench as bench_mod
from .problems import (UnknownProblemError, UnsupportedDimensionError,
                       available_problems, check_gradient_random, default_suite,
                       make_problem)
from .solver import (CONVERGED, NUMERICAL_FAILURE, Policy, TrustRegionConfig,
                     solve, write_trace)

__all__ = ["main", "run_cli"]

USAGE_ERROR = 64
GRAD_TOL = 1e-5

_POLICIES = tuple(p.value for p in Policy)
_BENCH_POLICIES = ("iatr", "niatr1", "niatr2", "natr")


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems with exit code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="natr",
                     description="Adaptive trust-region solvers, test "
                                 "problems and performance profiles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="minimize one test problem")
    p_solve.add_argument("--problem", required=True)
    p_solve.add_argument("--dim", type=int, required=True)
    p_solve.add_argument("--policy", choices=_POLICIES, default="natr")
    p_solve.add_argument("--param", action="append", default=[],
                         metavar="KEY=VALUE",
                         help="override a solver parameter, e.g. mu=0.05")
    p_solve.add_argument("--trace", metavar="FILE",
                         help="write per-iteration records to FILE")
    p_solve.add_argument("--print-config", action="store_true",
                         help="print the effective parameters and exit")

    p_bench = sub.add_parser("bench", help="run a solver x problem grid")
    p_bench.add_argument("--suite", default="default",
                         help="'default' or a file with one 'NAME DIM' per line")
    p_bench.add_argument("--out", required=True, metavar="DIR")
    p_bench.add_argument("--parallel", type=int, default=1, metavar="P")
    p_bench.add_argument("--warmup", action="store_true",
                         help="discard one warm-up run per (problem, solver)")
    p_bench.add_argument("--param", action="append", default=[],
                         metavar="KEY=VALUE")

    p_prof = sub.add_parser("profile", help="performance profiles from records")
    p_prof.add_argument("--records", required=True, metavar="FILE")
    p_prof.add_argument("--index", choices=bench_mod.PROFILE_INDEXES,
                        default="fevals")
    p_prof.add_argument("--out", required=True, metavar="DIR")
    p_prof.add_argument("--log2", action="store_true",
                        help="log2 ratio axis in the SVG")

    p_grad = sub.add_parser("check-grad", help="finite-difference gradient check")
    p_grad.add_argument("--problem", required=True)
    p_grad.add_argument("--dim", type=int, required=True)
    p_grad.add_argument("--points", type=int, default=10)
    p_grad.add_argument("--step", type=float, default=1e-6)
    p_grad.add_argument("--seed", type=int, default=0)

    sub.add_parser("list-problems", help="print the problem registry")
    return parser


_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(TrustRegionConfig)}


def _apply_params(parser, cfg_kwargs, params):
    for item in params:
        key, sep, value = item.partition("=")
        if not sep:
            parser.error(f"--param expects KEY=VALUE, got {item!r}")
        if key == "policy" or key not in _CONFIG_FIELDS:
            parser.error(f"unknown parameter {key!r}")
        try:
            if _CONFIG_FIELDS[key] is int or _CONFIG_FIELDS[key] == "int":
                cfg_kwargs[key] = int(value)
            else:
                cfg_kwargs[key] = float(value)
        except ValueError:
            parser.error(f"invalid value for {key!r}: {value!r}")
    return cfg_kwargs


def _make_config(parser, policy, params):
    kwargs = _apply_params(parser, {}, params)
    try:
        return TrustRegionConfig(policy=Policy(policy), **kwargs)
    except ValueError as exc:
        parser.error(str(exc))


def _load_problem(parser, name, dim):
    try:
        return make_problem(name, dim)
    except (UnknownProblemError, UnsupportedDimensionError) as exc:
        parser.error(str(exc))


def _read_suite(parser, spec):
    if spec == "default":
        return default_suite()
    pairs = []
    try:
        with open(spec) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                fields = line.split()
                if len(fields) != 2:
                    parser.error(f"{spec}:{lineno}: expected 'NAME DIM'")
                pairs.append((fields[0], int(fields[1])))
    except OSError as exc:
        parser.error(f"cannot read suite file: {exc}")
    if not pairs:
        parser.error(f"suite file {spec} is empty")
    return pairs


def _cmd_solve(parser, args):
    cfg = _make_config(parser, args.policy, args.param)
    if args.print_config:
        for f in dataclasses.fields(TrustRegionConfig):
            value = getattr(cfg, f.name)
            if isinstance(value, Policy):
                value = value.value
            print(f"{f.name}={value}")
        return 0
    problem = _load_problem(parser, args.problem, args.dim)
    res = solve(problem, cfg, collect_trace=args.trace is not None)
    if args.trace:
        write_trace(res.trace, args.trace)
    print(f"status={res.status} iters={res.iters} fevals={res.fevals} "
          f"f={res.final_f:.9e} gnorm={res.final_gnorm:.3e}")
    if res.status == CONVERGED:
        return 0
    if res.status == NUMERICAL_FAILURE:
        return 3
    return 2


def _cmd_bench(parser, args):
    pairs = _read_suite(parser, args.suite)
    problems = [_load_problem(parser, name, dim) for name, dim in pairs]
    solvers = []
    for policy in _BENCH_POLICIES:
        solvers.append((policy, _make_config(parser, policy, args.param)))
    records = bench_mod.run_suite(problems, solvers,
                                  parallelism=max(1, args.parallel),
                                  warmup=args.warmup)
    os.makedirs(args.out, exist_ok=True)
    out = os.path.join(args.out, "records.csv")
    bench_mod.export_records_csv(records, out)
    failures = sum(r.failed for r in records)
    print(f"wrote {out} ({len(records)} runs, {failures} failures)")
    return 0


def _cmd_profile(parser, args):
    try:
        records = bench_mod.load_records_csv(args.records)
    except OSError as exc:
        parser.error(f"cannot read records: {exc}")
    try:
        curves = bench_mod.performance_profile(records, args.index)
    except ValueError as exc:
        parser.error(str(exc))
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, f"profile_{args.index}.csv")
    svg_path = os.path.join(args.out, f"profile_{args.index}.svg")
    bench_mod.export_curves_csv(curves, csv_path)
    bench_mod.export_svg(curves, svg_path, log2_axis=args.log2)
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_check_grad(parser, args):
    problem = _load_problem(parser, args.problem, args.dim)
    report = check_gradient_random(problem, points=args.points,
                                   h=args.step, seed=args.seed)
    print(f"problem={problem.name} dim={problem.dim} "
          f"points={report.points_tested} "
          f"max_rel_err={report.max_rel_err:.3e} "
          f"worst_index={report.worst_index}")
    return 0 if report.max_rel_err <= GRAD_TOL else 1


def _cmd_list_problems():
    for name, dims in available_problems():
        print(f"{name:10s} {' '.join(str(d) for d in dims)}")
    return 0


def run_cli(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(parser, args)
    if args.command == "bench":
        return _cmd_bench(parser, args)
    if args.command == "profile":
        return _cmd_profile(parser, args)
    if args.command == "check-grad":
        return _cmd_check_grad(parser, args)
    return _cmd_list_problems()


def main() -> None:
    sys.exit(run_cli())
