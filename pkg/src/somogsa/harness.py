"""Experiment orchestration: gap metric, multi-start benchmark, CSV artifacts.

Runs the multi-objective escape search against a Nelder-Mead baseline from a
shared set of start points, archives every search path as a trace CSV,
aggregates normalized performance gaps into a report CSV, and regenerates the
landscape/decision/objective-space figures.  All file writes are atomic
(temp-then-rename) and all randomness is seeded, so repeated runs of the
same config are bit-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import os
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .baselines import GradientDescentConfig, NelderMeadConfig, nelder_mead
from .biobj import ObjectivePair, make_biobjective
from .engine import SomogsaConfig, run_somogsa
from .landscape import DEFAULT_TAU, build_grid, compute_field
from .problems import Array, Box, ScalarProblem, make_problem
from .rendering import (
    RenderStyle,
    render_decision_space,
    render_objective_space,
    render_plot,
    save_image,
)
from .trace import PhaseTag, SearchTrace, TraceEntry, best_of_trace

ALGO_SOMOGSA = "somogsa"
ALGO_NELDER_MEAD = "nelder-mead"
ALGORITHMS = (ALGO_SOMOGSA, ALGO_NELDER_MEAD)


# ------------------------------------------------------------------ gap metric


class GapResult(NamedTuple):
    value: float
    degenerate: bool  # start already at the optimal value; ratio undefined


def performance_gap(f1_best: float, f1_start: float, f1_opt: float) -> GapResult:
    """Normalized progress |f1_best - f1_start| / |f1_opt - f1_start| in [0, 1].

    0 means no progress from the start, 1 means the optimal value was
    reached.  A start already at the optimal value leaves the ratio
    undefined; it is reported as 1 with the degenerate flag set.
    """
    slack = 1e-12 * max(1.0, abs(f1_start), abs(f1_opt))
    if f1_best > f1_start + slack:
        raise ValueError("best value worse than start (archive keeps the start)")
    if f1_opt > f1_best + slack:
        raise ValueError("best value below the known optimum")
    denom = abs(f1_opt - f1_start)
    if denom <= slack:
        return GapResult(1.0, True)
    g = abs(f1_best - f1_start) / denom
    return GapResult(float(min(max(g, 0.0), 1.0)), False)


# ------------------------------------------------------------ eval accounting


class CountedProblem:
    """Wraps a problem so every objective evaluation is counted.

    Each f1 evaluation costs 1.  A finite-difference gradient therefore
    costs its 2n interior evaluations automatically; an analytic gradient
    costs nothing, and so does the sphere helper.
    """

    def __init__(self, inner: ScalarProblem):
        self._count = 0

        def counted_value(x):
            self._count += 1
            return inner.value(x)

        self.problem = ScalarProblem(
            name=inner.name, dim=inner.dim, box=inner.box,
            value=counted_value, gradient=inner.gradient,
            known_optimum=inner.known_optimum)

    @property
    def count(self) -> int:
        return self._count


# -------------------------------------------------------------- start sampling


def sample_starts(box: Box, n: int = 6, seed: int = 0,
                  avoid: Array | None = None, avoid_radius: float = 0.5) -> Array:
    """Seeded quasi-uniform starts: one jittered draw per block of a grid.

    Draws falling within ``avoid_radius`` of ``avoid`` (typically the known
    global optimum) are redrawn so no run starts already solved.
    """
    if n < 1:
        raise ValueError("need at least one start point")
    if box.dim != 2:
        raise ValueError("start sampling is 2-d")
    rng = np.random.default_rng(seed)
    nx = int(np.ceil(np.sqrt(n)))
    ny = int(np.ceil(n / nx))
    span = box.upper - box.lower
    block = span / np.array([nx, ny], dtype=float)
    points = []
    for k in range(n):
        bx, by = k % nx, k // nx
        lo = box.lower + np.array([bx, by], dtype=float) * block
        for _ in range(1000):
            p = lo + rng.random(2) * block
            if avoid is None or np.linalg.norm(p - avoid) >= avoid_radius:
                points.append(p)
                break
        else:
            raise ValueError("could not sample a start outside the excluded ball")
    return np.array(points)


# ---------------------------------------------------------------- experiment


@dataclass
class ExperimentConfig:
    problem: str = "rastrigin"
    sphere_center: Array = dc_field(default_factory=lambda: np.array([-3.5, -2.5]))
    start_points: Array | None = None  # explicit starts override the sampler
    n_starts: int = 6
    seed: int = 0
    resolution: tuple[int, int] = (100, 100)
    tau: float = DEFAULT_TAU
    images: bool = True
    objective_starts: tuple[str, ...] = ("s1",)
    out_dir: str | None = None
    somogsa: SomogsaConfig = dc_field(default_factory=SomogsaConfig)
    gd: GradientDescentConfig = dc_field(default_factory=GradientDescentConfig)
    nm: NelderMeadConfig = dc_field(default_factory=NelderMeadConfig)


def _parse_point(text: str) -> Array:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'x1,x2', got {text!r}")
    return np.array([float(p) for p in parts])


def _parse_resolution(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"expected 'RxC', got {text!r}")
    return (int(parts[0]), int(parts[1]))


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


# config key -> (target group, field name, converter); groups are the nested
# algorithm config dataclasses, "" is ExperimentConfig itself
_CONFIG_KEYS = {
    "problem": ("", "problem", str),
    "sphere_center": ("", "sphere_center", _parse_point),
    "starts": ("", "start_points",
               lambda t: np.array([_parse_point(p) for p in t.split(";") if p.strip()])),
    "n_starts": ("", "n_starts", int),
    "seed": ("", "seed", int),
    "resolution": ("", "resolution", _parse_resolution),
    "tau": ("", "tau", float),
    "images": ("", "images", _parse_bool),
    "objective_starts": ("", "objective_starts",
                         lambda t: tuple(p.strip() for p in t.split(",") if p.strip())),
    "out_dir": ("", "out_dir", str),
    "t_angle": ("somogsa", "t_angle", float),
    "sigma_mo": ("somogsa", "sigma_mo", float),
    "sigma_so": ("somogsa", "sigma_so", float),
    "eps_grad": ("somogsa", "eps_grad", float),
    "eps_f2opt": ("somogsa", "eps_f2opt", float),
    "max_outer": ("somogsa", "max_outer", int),
    "max_inner": ("somogsa", "max_inner", int),
    "gd_step": ("gd", "step", float),
    "gd_tol_grad": ("gd", "tol_grad", float),
    "gd_max_steps": ("gd", "max_steps", int),
    "nm_initial_simplex_scale": ("nm", "initial_simplex_scale", float),
    "nm_reflection": ("nm", "reflection", float),
    "nm_expansion": ("nm", "expansion", float),
    "nm_contraction": ("nm", "contraction", float),
    "nm_shrink": ("nm", "shrink", float),
    "nm_tol_simplex_diameter": ("nm", "tol_simplex_diameter", float),
    "nm_tol_f_spread": ("nm", "tol_f_spread", float),
    "nm_max_evals": ("nm", "max_evals", int),
}


def parse_config_file(path: str) -> ExperimentConfig:
    """Flat `key = value` file; '#' starts a comment; unknown keys are errors."""
    top: dict = {}
    groups: dict[str, dict] = {"somogsa": {}, "gd": {}, "nm": {}}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            group, field_name, convert = _CONFIG_KEYS[key]
            try:
                converted = convert(value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
            (top if group == "" else groups[group])[field_name] = converted
    cfg = ExperimentConfig(**top)
    if groups["somogsa"]:
        cfg.somogsa = dataclasses.replace(cfg.somogsa, **groups["somogsa"])
    if groups["gd"]:
        cfg.gd = dataclasses.replace(cfg.gd, **groups["gd"])
    if groups["nm"]:
        cfg.nm = dataclasses.replace(cfg.nm, **groups["nm"])
    return cfg


# -------------------------------------------------------------- trace CSV I/O


def write_trace_csv(trace: SearchTrace, path: str, dim: int = 2) -> None:
    """Archive a search path: iter,phase,x1..xn,f1,f2,grad1_norm per entry."""
    tmp = path + ".tmp"
    coords = [f"x{i + 1}" for i in range(dim)]
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "phase", *coords, "f1", "f2", "grad1_norm"])
        for e in trace.entries:
            writer.writerow([
                e.iteration, e.phase.value,
                *(repr(float(v)) for v in e.point),
                repr(float(e.objectives.f1_value)),
                repr(float(e.objectives.f2_value)),
                repr(float(e.grad1_norm)),
            ])
    os.replace(tmp, path)


def read_trace_csv(path: str) -> SearchTrace:
    """Rebuild trace entries from a trace CSV (the stop reason is not stored)."""
    trace = SearchTrace()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or reader.fieldnames[:2] != ["iter", "phase"]:
            raise ValueError(f"{path}: not a trace CSV")
        coords = [c for c in reader.fieldnames if c.startswith("x")]
        for row in reader:
            trace.entries.append(TraceEntry(
                point=np.array([float(row[c]) for c in coords]),
                objectives=ObjectivePair(float(row["f1"]), float(row["f2"])),
                phase=PhaseTag(row["phase"]),
                iteration=int(row["iter"]),
                grad1_norm=float(row["grad1_norm"]),
            ))
    return trace


# -------------------------------------------------------------------- report


@dataclass
class RunRow:
    start_id: str
    algo: str
    best_point: Array
    best_f1: float
    gap: GapResult
    evals: int
    reason: str


@dataclass
class RunReport:
    rows: list[RunRow]

    def mean_gap(self, algo: str) -> float:
        gaps = [r.gap.value for r in self.rows if r.algo == algo]
        if not gaps:
            raise ValueError(f"no rows for algorithm {algo!r}")
        return float(np.mean(gaps))


def write_report_csv(report: RunReport, path: str) -> None:
    """Rows then per-algorithm mean lines; gaps as percent with one decimal."""
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start_id", "algo", "best_f1", "gap", "evals", "reason"])
        for r in report.rows:
            writer.writerow([r.start_id, r.algo, repr(float(r.best_f1)),
                             f"{100.0 * r.gap.value:.1f}", r.evals, r.reason])
        for algo in ALGORITHMS:
            if any(r.algo == algo for r in report.rows):
                writer.writerow(["mean", algo, "",
                                 f"{100.0 * report.mean_gap(algo):.1f}", "", ""])
    os.replace(tmp, path)


# ---------------------------------------------------------------- experiment


def _run_one(problem: ScalarProblem, algo: str, x_s: Array,
             cfg: ExperimentConfig) -> tuple[SearchTrace, int]:
    counted = CountedProblem(problem)
    if algo == ALGO_SOMOGSA:
        P = make_biobjective(counted.problem, cfg.sphere_center)
        trace = run_somogsa(P, x_s, cfg.somogsa, cfg.gd)
    elif algo == ALGO_NELDER_MEAD:
        trace = nelder_mead(counted.problem, x_s, cfg.nm,
                            sphere_center=cfg.sphere_center)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return trace, counted.count


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Run every start x algorithm, write traces/report/figures into out_dir."""
    if cfg.out_dir is None:
        raise ValueError("config has no output directory")
    problem = make_problem(cfg.problem)
    if problem.known_optimum is None:
        raise ValueError(f"problem {cfg.problem!r} has no known optimum for the gap metric")
    opt_point, f1_opt = problem.known_optimum
    if cfg.start_points is not None:
        starts = np.asarray(cfg.start_points, dtype=float)
    else:
        starts = sample_starts(problem.box, cfg.n_starts, cfg.seed, avoid=opt_point)
    os.makedirs(cfg.out_dir, exist_ok=True)

    rows: list[RunRow] = []
    traces: dict[tuple[str, str], SearchTrace] = {}
    for i, x_s in enumerate(starts):
        sid = f"s{i + 1}"
        for algo in ALGORITHMS:
            trace, evals = _run_one(problem, algo, x_s, cfg)
            traces[(sid, algo)] = trace
            best_point, best_f1 = best_of_trace(trace)
            f1_start = trace.entries[0].objectives.f1_value
            gap = performance_gap(best_f1, f1_start, f1_opt)
            rows.append(RunRow(sid, algo, best_point, best_f1, gap, evals,
                               trace.terminated_reason.value))
            write_trace_csv(trace, os.path.join(cfg.out_dir, f"trace_{sid}_{algo}.csv"),
                            dim=problem.dim)

    report = RunReport(rows)
    write_report_csv(report, os.path.join(cfg.out_dir, "report.csv"))

    if cfg.images:
        _write_figures(cfg, problem, starts, traces, opt_point)
    return report


def _write_figures(cfg: ExperimentConfig, problem: ScalarProblem, starts: Array,
                   traces: dict, opt_point: Array) -> None:
    grid = build_grid(problem.box, cfg.resolution)
    P = make_biobjective(problem, cfg.sphere_center)
    field = compute_field(P, grid, cfg.tau)
    markers = [(opt_point, "triangle"), (cfg.sphere_center, "circle")]
    style = RenderStyle()
    ids = [f"s{i + 1}" for i in range(len(starts))]

    for algo in ALGORITHMS:
        overlays = [traces[(sid, algo)] for sid in ids]
        save_image(render_decision_space(problem, grid, overlays, markers, style),
                   os.path.join(cfg.out_dir, f"decision_{algo}.png"))
        save_image(render_plot(field, style, overlays, markers),
                   os.path.join(cfg.out_dir, f"plot_{algo}.png"))

    for sid in cfg.objective_starts:
        if sid not in ids:
            raise ValueError(f"objective_starts references unknown start {sid!r}")
        trace = traces[(sid, ALGO_SOMOGSA)]
        _, best_f1 = best_of_trace(trace)
        save_image(render_objective_space(field, trace, best_f1, style),
                   os.path.join(cfg.out_dir, f"objective_{sid}.png"))
