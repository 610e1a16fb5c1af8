"""Single-objective local-search baselines.

Nelder-Mead simplex search (the comparison algorithm) and fixed-step
gradient descent with backtracking (the f1 refinement step inside the
multi-objective engine).  Both clamp candidate points to the box before
evaluating and are fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .biobj import ObjectivePair
from .problems import Array, ScalarProblem, eval_sphere, finite_diff_grad
from .trace import PhaseTag, SearchTrace, StopReason, TraceEntry


@dataclass(frozen=True)
class GradientDescentConfig:
    step: float = 0.01
    tol_grad: float = 1e-6
    max_steps: int = 100000
    backtracking: bool = True

    def __post_init__(self):
        if self.step <= 0 or self.tol_grad <= 0 or self.max_steps <= 0:
            raise ValueError("gradient descent config values must be positive")


@dataclass(frozen=True)
class NelderMeadConfig:
    initial_simplex_scale: float = 0.5
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    tol_simplex_diameter: float = 1e-8
    tol_f_spread: float = 1e-14
    max_evals: int = 2000

    def __post_init__(self):
        ok = (
            self.initial_simplex_scale > 0
            and self.reflection > 0
            and self.expansion > 1
            and 0 < self.contraction < 1
            and 0 < self.shrink < 1
            and self.tol_simplex_diameter > 0
            and self.tol_f_spread > 0
            and self.max_evals > 0
        )
        if not ok:
            raise ValueError("invalid Nelder-Mead coefficients")


def _grad(f: ScalarProblem, x: Array) -> Array:
    if f.gradient is not None:
        return np.asarray(f.gradient(x), dtype=float)
    return finite_diff_grad(f, x)


def gradient_descent_f1(
    f: ScalarProblem,
    x: Array,
    cfg: GradientDescentConfig | None = None,
    on_step: Optional[Callable[[Array, float], None]] = None,
) -> Array:
    """Descend f with normalized fixed steps until the gradient vanishes.

    Steps are x <- clamp(x - t * g/|g|) with t halved (backtracking) until the
    value strictly decreases.  Stops at |g| <= tol_grad, at max_steps, or when
    no decreasing step is found.  ``on_step(x, grad_norm)`` is invoked for
    every accepted point.
    """
    cfg = cfg or GradientDescentConfig()
    x = np.asarray(x, dtype=float).copy()
    g = _grad(f, x)
    for _ in range(cfg.max_steps):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= cfg.tol_grad:
            break
        direction = g / gnorm
        fx = f.value(x)
        t = cfg.step
        accepted = None
        for _ in range(60):
            candidate = f.box.clamp(x - t * direction)
            if f.value(candidate) < fx:
                accepted = candidate
                break
            if not cfg.backtracking:
                break
            t *= 0.5
        if accepted is None:
            break
        x = accepted
        g = _grad(f, x)
        if on_step is not None:
            on_step(x, float(np.linalg.norm(g)))
    return x


def _simplex_diameter(vertices: Array) -> float:
    diffs = vertices[:, None, :] - vertices[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())


def nelder_mead(
    f: ScalarProblem,
    x_s: Array,
    cfg: NelderMeadConfig | None = None,
    sphere_center: Array | None = None,
) -> SearchTrace:
    """Nelder-Mead simplex search recording best-vertex improvements.

    The trace starts at x_s and gains an entry whenever the best vertex
    strictly improves.  ``sphere_center`` only fills the f2 column of trace
    entries (NaN when absent); the search itself is single-objective.
    """
    cfg = cfg or NelderMeadConfig()
    x_s = np.asarray(x_s, dtype=float)
    if not f.box.contains(x_s):
        raise ValueError("start point outside the box")

    def f2_at(x: Array) -> float:
        if sphere_center is None:
            return float("nan")
        return eval_sphere(x, sphere_center)

    n = f.dim
    vertices = np.tile(x_s, (n + 1, 1))
    for i in range(n):
        vertices[i + 1, i] += cfg.initial_simplex_scale
        vertices[i + 1] = f.box.clamp(vertices[i + 1])
    fvals = np.array([f.value(v) for v in vertices])
    evals = n + 1

    entries = [
        TraceEntry(x_s.copy(), ObjectivePair(float(fvals[0]), f2_at(x_s)),
                   PhaseTag.START, 0)
    ]
    best_seen = float(fvals[0])
    reason = StopReason.MAX_EVALS

    def note_best():
        nonlocal best_seen
        order = np.argsort(fvals, kind="stable")
        if fvals[order[0]] < best_seen:
            best_seen = float(fvals[order[0]])
            point = vertices[order[0]].copy()
            entries.append(
                TraceEntry(point, ObjectivePair(best_seen, f2_at(point)),
                           PhaseTag.NELDER_MEAD, len(entries))
            )

    while True:
        order = np.argsort(fvals, kind="stable")
        vertices = vertices[order]
        fvals = fvals[order]
        if _simplex_diameter(vertices) <= cfg.tol_simplex_diameter:
            reason = StopReason.SIMPLEX_DIAMETER
            break
        if float(fvals[-1] - fvals[0]) <= cfg.tol_f_spread:
            reason = StopReason.F_SPREAD
            break
        if evals >= cfg.max_evals:
            reason = StopReason.MAX_EVALS
            break

        centroid = vertices[:-1].mean(axis=0)
        worst = vertices[-1]
        reflected = f.box.clamp(centroid + cfg.reflection * (centroid - worst))
        f_r = f.value(reflected)
        evals += 1

        if f_r < fvals[0]:
            expanded = f.box.clamp(centroid + cfg.expansion * (centroid - worst))
            f_e = f.value(expanded)
            evals += 1
            if f_e < f_r:
                vertices[-1], fvals[-1] = expanded, f_e
            else:
                vertices[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            vertices[-1], fvals[-1] = reflected, f_r
        else:
            if f_r < fvals[-1]:
                # outside contraction, toward the reflected point
                contracted = f.box.clamp(centroid + cfg.contraction * (reflected - centroid))
            else:
                # inside contraction, toward the worst vertex
                contracted = f.box.clamp(centroid + cfg.contraction * (worst - centroid))
            f_c = f.value(contracted)
            evals += 1
            if f_c < min(f_r, fvals[-1]):
                vertices[-1], fvals[-1] = contracted, f_c
            else:
                for i in range(1, n + 1):
                    vertices[i] = f.box.clamp(
                        vertices[0] + cfg.shrink * (vertices[i] - vertices[0])
                    )
                    fvals[i] = f.value(vertices[i])
                evals += n
        note_best()

    return SearchTrace(entries, reason)
