"""Command-line entry point.

One binary, subcommand style.  Machine output goes to --output (default
stdout); diagnostics go to stderr, never interleaved with results.  Exit
codes: 0 success, 1 usage error, 2 data or validation error, 3 solver
budget exceeded (results still emitted, flagged).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import bound_report, hall_full_throughput_upper_bound
from .core import throughput, validate_instance, validate_read_plan
from .ensemble import (
    DEFAULT_SEED,
    compare_mds_replication,
    compare_schemes,
    default_loads,
    run_ensemble,
    sweep_hall_bound,
)
from .formats import (
    FormatError,
    bound_report_document,
    dump_json,
    parse_ensemble_config,
    parse_instance,
    parse_lsp,
    parse_plan,
    plan_document,
    reduction_document,
    stats_document,
)
from .reduction import reduce_set_packing
from .solvers import dispatch_solver

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BUDGET = 3


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _stats_text(stats, fmt: str) -> str:
    if fmt == "csv":
        return stats.to_csv()
    return dump_json(stats_document(stats))


def _add_output_flags(sub, formats: bool = True) -> None:
    sub.add_argument("--output", default="-", help="output path, or - for stdout")
    if formats:
        sub.add_argument(
            "--format",
            choices=("csv", "json", "structured-text"),
            default="csv",
            help="csv (default) or structured text (json)",
        )


def _normalize_format(fmt: str) -> str:
    return "json" if fmt == "structured-text" else fmt


def _cmd_validate(args) -> int:
    inst = parse_instance(_read_file(args.instance), validate=False)
    report = validate_instance(inst)
    doc: dict = {"ok": report.ok, "violations": list(report.violations)}
    ok = report.ok
    if args.plan is not None:
        plan_ok = False
        if report.ok:
            plan = parse_plan(_read_file(args.plan))
            plan_ok = validate_read_plan(inst, plan)
        doc["plan_ok"] = plan_ok
        ok = ok and plan_ok
    _write_output(dump_json(doc), args.output)
    return EXIT_OK if ok else EXIT_DATA


def _cmd_solve(args) -> int:
    inst = parse_instance(_read_file(args.instance))
    result = dispatch_solver(args.solver, inst, node_budget=args.node_budget)
    rho = throughput(inst, result.optimal_count)
    _write_output(dump_json(plan_document(inst, result.plan, rho)), args.output)
    print(
        f"solver={result.solver_tag} nodes={result.nodes_explored} "
        f"budget_exceeded={str(result.budget_exceeded).lower()}",
        file=sys.stderr,
    )
    return EXIT_BUDGET if result.budget_exceeded else EXIT_OK


def _cmd_bound(args) -> int:
    inst = parse_instance(_read_file(args.instance))
    report = bound_report(inst, samples=args.samples, seed=args.seed)
    _write_output(dump_json(bound_report_document(report)), args.output)
    return EXIT_OK


def _cmd_hallbound(args) -> int:
    if args.load < 0 or args.k < 1:
        raise ValueError("need L >= 0 and k >= 1")
    p = hall_full_throughput_upper_bound(args.load, args.k, args.n, args.n_units)
    _write_output(repr(p) + "\n", args.output)
    return EXIT_OK


def _cmd_reduce(args) -> int:
    lsp = parse_lsp(_read_file(args.lsp), target=args.target)
    reduced = reduce_set_packing(lsp)
    _write_output(dump_json(reduction_document(reduced)), args.output)
    return EXIT_OK


def _emit_stats(args, stats, render=None) -> int:
    _write_output(_stats_text(stats, _normalize_format(args.format)), args.output)
    if getattr(args, "plot", None):
        render(stats, args.plot)
    if any(row.budget_flagged for row in stats.rows):
        print("warning: some instances exceeded the node budget", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_ensemble(args) -> int:
    config = parse_ensemble_config(_read_file(args.config))
    return _emit_stats(args, run_ensemble(config))


def _cmd_fig2(args) -> int:
    from . import plots

    stats = compare_mds_replication(
        n_units=args.n_units,
        loads=args.loads,
        instances_per_point=args.samples,
        master_seed=args.seed,
    )
    return _emit_stats(args, stats, plots.render_mean_served)


def _cmd_fig4(args) -> int:
    from . import plots

    stats = sweep_hall_bound(
        n_units=args.n_units,
        k=args.k,
        n_values=args.n_values,
        loads=args.loads,
        instances_per_point=args.samples,
        master_seed=args.seed,
    )
    return _emit_stats(args, stats, plots.render_full_throughput)


def _cmd_fig5(args) -> int:
    from . import plots

    stats = compare_schemes(
        n_units=args.n_units,
        k=args.k,
        n=args.n,
        loads=args.loads,
        instances_per_point=args.samples,
        master_seed=args.seed,
    )
    return _emit_stats(args, stats, plots.render_mean_throughput)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codedswitch",
        description="Coded packet storage: read solvers, bounds, and experiments.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("validate", help="check an instance (and optional plan) file")
    sub.add_argument("--instance", required=True)
    sub.add_argument("--plan")
    _add_output_flags(sub, formats=False)
    sub.set_defaults(handler=_cmd_validate)

    sub = subs.add_parser("solve", help="solve the read problem for one instance")
    sub.add_argument("--instance", required=True)
    sub.add_argument(
        "--solver", choices=("auto", "exact", "matching", "greedy"), default="auto"
    )
    sub.add_argument("--node-budget", type=int, default=None)
    _add_output_flags(sub, formats=False)
    sub.set_defaults(handler=_cmd_solve)

    sub = subs.add_parser("bound", help="probabilistic throughput bounds for an instance")
    sub.add_argument("--instance", required=True)
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--seed", type=int, default=0)
    _add_output_flags(sub, formats=False)
    sub.set_defaults(handler=_cmd_bound)

    sub = subs.add_parser(
        "hallbound", help="full-throughput probability upper bound from union sizes"
    )
    sub.add_argument("--L", dest="load", type=int, required=True)
    sub.add_argument("--k", type=int, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--N", dest="n_units", type=int, required=True)
    _add_output_flags(sub, formats=False)
    sub.set_defaults(handler=_cmd_hallbound)

    sub = subs.add_parser("reduce", help="reduce a set-packing instance to a read instance")
    sub.add_argument("--lsp", required=True)
    sub.add_argument("--M", dest="target", type=int, required=True)
    _add_output_flags(sub, formats=False)
    sub.set_defaults(handler=_cmd_reduce)

    sub = subs.add_parser("ensemble", help="run the ensemble described by a config file")
    sub.add_argument("--config", required=True)
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_ensemble)

    sub = subs.add_parser("fig2", help="MDS versus replication mean served packets")
    sub.add_argument("--N", dest="n_units", type=int, default=16)
    sub.add_argument("--samples", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--loads", type=_int_list, default=None)
    sub.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_fig2)

    sub = subs.add_parser("fig4", help="full-throughput fraction against the Hall bound")
    sub.add_argument("--N", dest="n_units", type=int, default=16)
    sub.add_argument("--k", type=int, default=2)
    sub.add_argument("--n-values", dest="n_values", type=_int_list, default=(2, 3, 4))
    sub.add_argument("--samples", type=int, default=10000)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--loads", type=_int_list, default=None)
    sub.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_fig4)

    sub = subs.add_parser("fig5", help="write-policy comparison by mean throughput")
    sub.add_argument("--N", dest="n_units", type=int, default=16)
    sub.add_argument("--k", type=int, default=3)
    sub.add_argument("--n", type=int, default=4)
    sub.add_argument("--samples", type=int, default=500)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--loads", type=_int_list, default=None)
    sub.add_argument("--plot", default=None, help="also render a PNG figure to this path")
    _add_output_flags(sub)
    sub.set_defaults(handler=_cmd_fig5)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.handler(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
