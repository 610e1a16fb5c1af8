"""Multi-objective gradient search with a sphere helper objective.

The driver escapes local optima of f1 by alternating three phases while the
helper optimum s has not been reached:

  (a) descend the combined normalized gradient of (f1, f2) until the two
      gradients almost oppose (the locally efficient set is near),
  (b) refine f1 with single-objective gradient descent,
  (c) slide along -grad f2 toward s while the gradients stay opposed,
      i.e. while the walk stays on locally efficient ground or climbs out
      of the current basin; the slide stops when a new basin opens.

Every accepted point is archived with its objective values and phase tag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import GradientDescentConfig, gradient_descent_f1
from .biobj import EPS_GRAD, BiObjectiveProblem, evaluate_pair
from .problems import Array
from .trace import PhaseTag, SearchTrace, StopReason, TraceEntry, best_of_trace

__all__ = [
    "SomogsaConfig",
    "NonFiniteObjective",
    "run_somogsa",
    "best_of_trace",
    "PhaseTag",
    "SearchTrace",
    "StopReason",
    "TraceEntry",
]


@dataclass(frozen=True)
class SomogsaConfig:
    t_angle: float = 170.0
    sigma_mo: float = 0.01
    sigma_so: float = 0.01
    eps_grad: float = EPS_GRAD
    eps_f2opt: float = 1e-3
    max_outer: int = 1000
    max_inner: int = 100000

    def __post_init__(self):
        if not 0.0 <= self.t_angle <= 180.0:
            raise ValueError("t_angle must lie in [0, 180] degrees")
        if min(self.sigma_mo, self.sigma_so, self.eps_grad, self.eps_f2opt) <= 0.0:
            raise ValueError("step sizes and tolerances must be positive")
        if self.max_outer <= 0 or self.max_inner <= 0:
            raise ValueError("iteration caps must be positive")


class NonFiniteObjective(RuntimeError):
    """An objective value turned non-finite; carries the trace so far."""

    def __init__(self, message: str, trace: SearchTrace):
        super().__init__(message)
        self.trace = trace


def _angle(u: Array, nu: float, v: Array, nv: float) -> float:
    cos = float(np.dot(u, v)) / (nu * nv)
    cos = min(1.0, max(-1.0, cos))
    return float(np.degrees(np.arccos(cos)))


def run_somogsa(
    P: BiObjectiveProblem,
    x_s: Array,
    cfg: SomogsaConfig | None = None,
    gd_cfg: GradientDescentConfig | None = None,
) -> SearchTrace:
    """Run the three-phase search from x_s; returns the full archive."""
    cfg = cfg or SomogsaConfig()
    gd_cfg = gd_cfg or GradientDescentConfig()
    x = np.asarray(x_s, dtype=float).copy()
    if x.shape != (P.dim,):
        raise ValueError("start point dimension mismatch")
    if not P.box.contains(x):
        raise ValueError("start point outside the box")
    s = P.sphere_center
    # a point whose f1 gradient the local search no longer distinguishes
    # from zero counts as stationary for the slide-phase angle test
    stationary_tol = max(cfg.eps_grad, gd_cfg.tol_grad)

    entries: list[TraceEntry] = []

    def record(point: Array, phase: PhaseTag, grad1_norm: float) -> None:
        pair = evaluate_pair(P, point)
        if not (np.isfinite(pair.f1_value) and np.isfinite(pair.f2_value)):
            raise NonFiniteObjective(
                f"non-finite objective at {point}",
                SearchTrace(entries, StopReason.MAX_ITER),
            )
        entries.append(TraceEntry(point.copy(), pair, phase, len(entries), grad1_norm))

    g1 = P.grad_f1(x)
    record(x, PhaseTag.START, float(np.linalg.norm(g1)))

    reason = StopReason.MAX_ITER
    prev_end = None
    outer = 0
    while True:
        if float(np.linalg.norm(x - s)) <= cfg.eps_f2opt:
            reason = StopReason.F2_OPT_REACHED
            break
        if outer >= cfg.max_outer:
            reason = StopReason.MAX_ITER
            break
        outer += 1

        # (a) combined-gradient descent toward the locally efficient set
        capped = False
        inner = 0
        while True:
            n1 = float(np.linalg.norm(g1))
            if n1 <= cfg.eps_grad:
                break
            g2 = P.grad_f2(x)
            n2 = float(np.linalg.norm(g2))
            if n2 <= cfg.eps_grad:
                break
            if _angle(g1, n1, g2, n2) > cfg.t_angle:
                break
            combined = g1 / n1 + g2 / n2
            if float(np.linalg.norm(combined)) <= cfg.eps_grad:
                break  # gradients oppose exactly; the step would be zero
            if inner >= cfg.max_inner:
                capped = True
                break
            inner += 1
            x_new = P.box.clamp(x - cfg.sigma_mo * combined)
            if np.array_equal(x_new, x):
                break  # clamped without moving
            x = x_new
            g1 = P.grad_f1(x)
            record(x, PhaseTag.MO_DESCENT, float(np.linalg.norm(g1)))
        if capped:
            reason = StopReason.MAX_ITER
            break

        # (b) single-objective refinement of f1
        x = gradient_descent_f1(
            P.f1, x, gd_cfg,
            on_step=lambda p, g: record(p, PhaseTag.LOCAL_SEARCH_F1, g),
        )

        # (c) slide toward the helper optimum along -grad f2
        x_prev = x.copy()
        g1 = P.grad_f1(x)
        inner = 0
        while True:
            g2 = P.grad_f2(x)
            n2 = float(np.linalg.norm(g2))
            if n2 <= cfg.eps_grad:
                break  # standing on the sphere center
            n1 = float(np.linalg.norm(g1))
            if n1 > stationary_tol and _angle(g1, n1, g2, n2) < 90.0:
                break  # gradients agree again: a new basin has opened
            g2_prev = P.grad_f2(x_prev)
            n2_prev = float(np.linalg.norm(g2_prev))
            if n2_prev > cfg.eps_grad and _angle(g2_prev, n2_prev, g2, n2) > 90.0:
                break  # helper gradient flipped: ridge crossed / overshot
            if inner >= cfg.max_inner:
                capped = True
                break
            inner += 1
            dist = float(np.linalg.norm(x - s))
            if dist <= cfg.sigma_so:
                x_new = s.copy()  # final step capped: land exactly on s
            else:
                x_new = P.box.clamp(x - cfg.sigma_so * (g2 / n2))
            if np.array_equal(x_new, x):
                break  # clamped without moving
            x_prev = x
            x = x_new
            g1 = P.grad_f1(x)
            record(x, PhaseTag.SLIDE_F2, float(np.linalg.norm(g1)))
        if capped:
            reason = StopReason.MAX_ITER
            break

        if prev_end is not None and np.array_equal(x, prev_end):
            reason = StopReason.BOX_STUCK
            break
        prev_end = x.copy()

    return SearchTrace(entries, reason)
