"""Multiobjectivized gradient search toolkit.

Single-objective multimodal problems are paired with a sphere helper
objective; multi-objective gradient descent then walks out of local optima.
Includes grid landscape plots of the induced bi-objective structure and a
small benchmark harness with a Nelder-Mead baseline.
"""

from .baselines import (
    GradientDescentConfig,
    NelderMeadConfig,
    gradient_descent_f1,
    nelder_mead,
)
from .biobj import (
    EPS_GRAD,
    BiObjectiveProblem,
    DegenerateGradient,
    ObjectivePair,
    angle_deg,
    dominates,
    evaluate_pair,
    fritz_john_residual,
    make_biobjective,
    mo_gradient,
)
from .engine import NonFiniteObjective, SomogsaConfig, run_somogsa
from .harness import (
    CountedProblem,
    ExperimentConfig,
    GapResult,
    RunReport,
    RunRow,
    parse_config_file,
    performance_gap,
    read_trace_csv,
    run_experiment,
    sample_starts,
    write_report_csv,
    write_trace_csv,
)
from .landscape import (
    DEFAULT_TAU,
    GridSpec,
    PlotField,
    accumulate_heights,
    build_grid,
    compute_field,
    detect_efficient_cells,
    dominance_counts,
    mo_gradient_field,
    write_field_csv,
)
from .problems import (
    Box,
    GallagherSpec,
    ScalarProblem,
    build_gallagher,
    default_box,
    eval_gallagher,
    eval_rastrigin,
    eval_sphere,
    finite_diff_grad,
    grad_gallagher,
    grad_rastrigin,
    grad_sphere,
    make_problem,
    relative_gradient_error,
)
from .rendering import (
    RenderStyle,
    render_decision_space,
    render_objective_space,
    render_plot,
    save_image,
)
from .trace import PhaseTag, SearchTrace, StopReason, TraceEntry, best_of_trace

__all__ = [
    "EPS_GRAD",
    "DEFAULT_TAU",
    "BiObjectiveProblem",
    "Box",
    "CountedProblem",
    "DegenerateGradient",
    "ExperimentConfig",
    "GallagherSpec",
    "GapResult",
    "GradientDescentConfig",
    "GridSpec",
    "NelderMeadConfig",
    "NonFiniteObjective",
    "ObjectivePair",
    "PhaseTag",
    "PlotField",
    "RenderStyle",
    "RunReport",
    "RunRow",
    "ScalarProblem",
    "SearchTrace",
    "SomogsaConfig",
    "StopReason",
    "TraceEntry",
    "accumulate_heights",
    "angle_deg",
    "best_of_trace",
    "build_gallagher",
    "build_grid",
    "compute_field",
    "default_box",
    "detect_efficient_cells",
    "dominance_counts",
    "dominates",
    "eval_gallagher",
    "eval_rastrigin",
    "eval_sphere",
    "evaluate_pair",
    "finite_diff_grad",
    "fritz_john_residual",
    "grad_gallagher",
    "grad_rastrigin",
    "grad_sphere",
    "gradient_descent_f1",
    "make_biobjective",
    "make_problem",
    "mo_gradient",
    "mo_gradient_field",
    "nelder_mead",
    "parse_config_file",
    "performance_gap",
    "read_trace_csv",
    "relative_gradient_error",
    "render_decision_space",
    "render_objective_space",
    "render_plot",
    "run_experiment",
    "run_somogsa",
    "sample_starts",
    "save_image",
    "write_field_csv",
    "write_report_csv",
    "write_trace_csv",
]
