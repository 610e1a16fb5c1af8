"""Command-line interface.

Three subcommands: ``run`` executes a single search from one start point and
archives its trace, ``plot`` renders the landscape image (optionally with
stored traces overlaid), and ``bench`` runs the full multi-start comparison
from a config file.  Exit codes: 0 success, 2 usage error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import re
import sys

from .baselines import nelder_mead
from .biobj import make_biobjective
from .engine import SomogsaConfig, run_somogsa
from .harness import (
    _parse_point,
    _parse_resolution,
    parse_config_file,
    read_trace_csv,
    run_experiment,
    write_trace_csv,
)
from .landscape import DEFAULT_TAU, build_grid, compute_field, write_field_csv
from .problems import make_problem
from .rendering import render_plot, save_image
from .trace import best_of_trace

ALGO_CHOICES = ("somogsa", "nelder-mead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="somogsa",
        description="Multiobjectivized gradient search: run, visualize, benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one search and write its trace CSV")
    run_p.add_argument("--problem", required=True, help="problem id, e.g. rastrigin")
    run_p.add_argument("--algo", required=True, choices=ALGO_CHOICES)
    run_p.add_argument("--start", required=True, type=_parse_point, metavar="x1,x2")
    run_p.add_argument("--sphere-center", required=True, type=_parse_point, metavar="x1,x2")
    run_p.add_argument("--t-angle", type=float, default=None, metavar="D",
                       help="multi-objective descent angle threshold in degrees")
    run_p.add_argument("--sigma-mo", type=float, default=None, metavar="S")
    run_p.add_argument("--sigma-so", type=float, default=None, metavar="S")
    run_p.add_argument("--eps-f2opt", type=float, default=None, metavar="E")
    run_p.add_argument("--trace-out", required=True, metavar="FILE")
    run_p.set_defaults(func=cmd_run)

    plot_p = sub.add_parser("plot", help="render the landscape image")
    plot_p.add_argument("--problem", required=True)
    plot_p.add_argument("--sphere-center", required=True, type=_parse_point, metavar="x1,x2")
    plot_p.add_argument("--resolution", required=True, type=_parse_resolution, metavar="RxC")
    plot_p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    plot_p.add_argument("--trace", action="append", default=[], metavar="FILE",
                        help="trace CSV to overlay; repeatable")
    plot_p.add_argument("--out", required=True, metavar="IMG")
    plot_p.add_argument("--field-out", default=None, metavar="CSV")
    plot_p.set_defaults(func=cmd_plot)

    bench_p = sub.add_parser("bench", help="multi-start benchmark from a config file")
    bench_p.add_argument("--config", required=True, metavar="FILE")
    bench_p.add_argument("--out-dir", required=True, metavar="DIR")
    bench_p.set_defaults(func=cmd_bench)

    # let values like "-3.5,-2.5" parse as data instead of option strings
    negative_value = re.compile(r"^-\d|^-\.\d")
    for p in (parser, run_p, plot_p, bench_p):
        p._negative_number_matcher = negative_value
    return parser


def cmd_run(args) -> int:
    problem = make_problem(args.problem)
    if args.algo == "somogsa":
        overrides = {name: value for name, value in (
            ("t_angle", args.t_angle), ("sigma_mo", args.sigma_mo),
            ("sigma_so", args.sigma_so), ("eps_f2opt", args.eps_f2opt),
        ) if value is not None}
        P = make_biobjective(problem, args.sphere_center)
        trace = run_somogsa(P, args.start, SomogsaConfig(**overrides))
    else:
        trace = nelder_mead(problem, args.start, sphere_center=args.sphere_center)
    write_trace_csv(trace, args.trace_out, dim=problem.dim)
    _, best_f1 = best_of_trace(trace)
    print(f"best_f1={best_f1!r} reason={trace.terminated_reason.value} "
          f"entries={len(trace)} trace={args.trace_out}")
    return 0


def cmd_plot(args) -> int:
    problem = make_problem(args.problem)
    P = make_biobjective(problem, args.sphere_center)
    grid = build_grid(problem.box, args.resolution)
    field = compute_field(P, grid, args.tau)
    overlays = [read_trace_csv(f) for f in args.trace]
    markers = [(args.sphere_center, "circle")]
    if problem.known_optimum is not None:
        markers.insert(0, (problem.known_optimum[0], "triangle"))
    save_image(render_plot(field, overlays=overlays, markers=markers), args.out)
    if args.field_out:
        write_field_csv(field, args.field_out)
    print(f"image={args.out} efficient_cells={int(field.efficient.sum())}")
    return 0


def cmd_bench(args) -> int:
    cfg = parse_config_file(args.config)
    cfg.out_dir = args.out_dir
    report = run_experiment(cfg)
    for algo in ALGO_CHOICES:
        print(f"mean_gap[{algo}]={report.mean_gap(algo):.3f}")
    print(f"out_dir={args.out_dir} rows={len(report.rows)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits itself: 2 on usage, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
