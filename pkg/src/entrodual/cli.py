"""Command-line interface: gen, solve, rate, compare.

Exit codes: 0 on success, 2 for configuration problems, 3 for numeric
failures inside a solver.
"""

import argparse
import sys

from .errors import ConfigError, NumericFailure
from .harness import (
    ExperimentConfig,
    compare_solvers,
    comparison_table,
    load_config,
    merge_config,
    run_experiment,
)
from .problem import generate_instance, instance_checksum, save_instance
from .trace import fit_rate, load_trace

# Safety margin subtracted from a reference run's best value when it stands
# in for the unknown optimum.
REFERENCE_MARGIN = 1e-12


def _add_config_flags(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--solver", choices=("stm", "acrcd", "subgradient"))
    sub.add_argument("--topology", help="generator spec or file:<path>")
    sub.add_argument("--instance", help="instance file to load instead of generating")
    sub.add_argument("--m", type=int)
    sub.add_argument("--n", type=int)
    sub.add_argument("--d", type=int)
    sub.add_argument("--p", type=float)
    sub.add_argument("--theta", type=float)
    sub.add_argument("--seed", type=int, help="instance generator seed")
    sub.add_argument("--scale", type=float)
    sub.add_argument("--max-iter", type=int, dest="max_iter")
    sub.add_argument("--target-eps", type=float, dest="target_eps")
    sub.add_argument("--L", type=float)
    sub.add_argument("--mu", type=float)
    sub.add_argument("--nu", type=float)
    sub.add_argument("--q", type=float)
    sub.add_argument("--solver-seed", type=int, dest="solver_seed")
    sub.add_argument("--step-rule", dest="step_rule")
    sub.add_argument("--penalty", type=float)
    sub.add_argument("--trace-every", type=int, dest="trace_every")
    sub.add_argument("--timing", action="store_const", const=True, default=None,
                     help="record wall times (makes traces run-dependent)")
    sub.add_argument("--out", help="output directory")


def _config_from_args(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    keys = ("solver", "topology", "instance", "m", "n", "d", "p", "theta",
            "seed", "scale", "max_iter", "target_eps", "L", "mu", "nu", "q",
            "solver_seed", "step_rule", "penalty", "trace_every", "timing", "out")
    return merge_config(cfg, {k: getattr(args, k) for k in keys})


def _cmd_gen(args):
    inst = generate_instance(args.seed, args.m, args.n, args.d, args.p,
                             args.theta, args.scale)
    save_instance(inst, args.out)
    print(f"wrote {args.out} (checksum {instance_checksum(inst)})")
    return 0


def _cmd_solve(args):
    cfg = _config_from_args(args)
    summary, _ = run_experiment(cfg)
    for key in ("solver", "iters", "final_dual_obj", "final_primal_obj",
                "final_gap", "final_consensus_residual", "n_comm", "n_comp"):
        if key in summary:
            print(f"{key}={summary[key]}")
    if cfg.out:
        print(f"artifacts in {cfg.out}")
    return 0


def _cmd_rate(args):
    trace = load_trace(args.trace)
    if args.fstar is not None:
        f_star = args.fstar
    elif args.ref is not None:
        ref = load_trace(args.ref)
        f_star = min(ref.column(args.column)) - REFERENCE_MARGIN
    else:
        raise ConfigError("rate needs --fstar or --ref")
    try:
        report = fit_rate(trace, args.column, (args.kmin, args.kmax), f_star)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"slope={report.slope!r}")
    print(f"intercept={report.intercept!r}")
    print(f"window={report.window[0]}..{report.window[1]}")
    print(f"r_squared={report.r_squared!r}")
    return 0


def _cmd_compare(args):
    cfg = _config_from_args(args)
    solvers = [name.strip() for name in args.solvers.split(",") if name.strip()]
    if not solvers:
        raise ConfigError("no solvers listed")
    results = compare_solvers(cfg, solvers)
    print(comparison_table(results))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entrodual",
        description="Dual decomposition solvers for entropy-regularized "
                    "p-norm fitting over networks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a random instance file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--m", type=int, default=4)
    gen.add_argument("--n", type=int, default=3)
    gen.add_argument("--d", type=int, default=5)
    gen.add_argument("--p", type=float, default=2.0)
    gen.add_argument("--theta", type=float, default=0.5)
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    solve = commands.add_parser("solve", help="run one configured experiment")
    _add_config_flags(solve)
    solve.set_defaults(func=_cmd_solve)

    rate = commands.add_parser("rate", help="fit a power-law rate to a trace")
    rate.add_argument("--trace", required=True)
    rate.add_argument("--column", default="dual_obj")
    rate.add_argument("--kmin", type=int, default=10)
    rate.add_argument("--kmax", type=int, default=500)
    rate.add_argument("--fstar", type=float)
    rate.add_argument("--ref", help="reference trace; its best value stands in for F*")
    rate.set_defaults(func=_cmd_rate)

    compare = commands.add_parser("compare", help="run several solvers on one instance")
    _add_config_flags(compare)
    compare.add_argument("--solvers", default="stm,subgradient",
                         help="comma-separated solver list")
    compare.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericFailure, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
