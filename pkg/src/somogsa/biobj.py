"""Bi-objective construction: f1 plus a sphere helper objective f2.

The helper is a sphere with fixed center s inside f1's box.  This module
provides the paired evaluation, the dominance relation, the normalized
multi-objective gradient (sum of unit gradients), gradient angles, and the
Fritz John residual that characterizes local efficiency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .problems import Array, ScalarProblem, eval_sphere, finite_diff_grad, grad_sphere

# a gradient with norm <= EPS_GRAD is treated as vanished
EPS_GRAD = 1e-8


class DegenerateGradient(Exception):
    """Raised when a gradient norm is at or below EPS_GRAD.

    ``objective`` names the vanished gradient ("f1" or "f2" in problem
    context); callers treat the point as a single-objective optimum.
    """

    def __init__(self, objective: str, norm: float):
        super().__init__(f"{objective} gradient vanished (norm={norm:.3e})")
        self.objective = objective
        self.norm = norm


class ObjectivePair(NamedTuple):
    f1_value: float
    f2_value: float


@dataclass(frozen=True)
class BiObjectiveProblem:
    """f1 from the problem suite plus the sphere helper f2 centered at s."""

    f1: ScalarProblem
    sphere_center: Array

    def __post_init__(self):
        s = np.asarray(self.sphere_center, dtype=float)
        if s.shape != (self.f1.dim,):
            raise ValueError("sphere center dimension does not match f1")
        if not self.f1.box.contains(s):
            raise ValueError("sphere center must lie within the f1 box")
        object.__setattr__(self, "sphere_center", s)

    @property
    def dim(self) -> int:
        return self.f1.dim

    @property
    def box(self):
        return self.f1.box

    def f1_value(self, x: Array) -> float:
        return self.f1.value(x)

    def f2_value(self, x: Array) -> float:
        return eval_sphere(x, self.sphere_center)

    def grad_f1(self, x: Array) -> Array:
        if self.f1.gradient is not None:
            return np.asarray(self.f1.gradient(x), dtype=float)
        return finite_diff_grad(self.f1, x)

    def grad_f2(self, x: Array) -> Array:
        # always analytic: the helper's derivative is known in closed form
        return grad_sphere(x, self.sphere_center)


def make_biobjective(f1: ScalarProblem, s: Array) -> BiObjectiveProblem:
    """Pair f1 with a sphere helper centered at s (must lie in f1's box)."""
    return BiObjectiveProblem(f1, s)


def evaluate_pair(problem: BiObjectiveProblem, x: Array) -> ObjectivePair:
    return ObjectivePair(problem.f1_value(x), problem.f2_value(x))


def normalized_sum(g1: Array, g2: Array) -> Array:
    """Sum of unit gradients; raises DegenerateGradient if either vanished."""
    n1 = float(np.linalg.norm(g1))
    if n1 <= EPS_GRAD:
        raise DegenerateGradient("f1", n1)
    n2 = float(np.linalg.norm(g2))
    if n2 <= EPS_GRAD:
        raise DegenerateGradient("f2", n2)
    return g1 / n1 + g2 / n2


def mo_gradient(problem: BiObjectiveProblem, x: Array) -> Array:
    """Normalized-gradient sum at x; zero vector iff gradients oppose exactly."""
    return normalized_sum(problem.grad_f1(x), problem.grad_f2(x))


def angle_deg(u: Array, v: Array) -> float:
    """Angle between u and v in degrees, in [0, 180]."""
    nu = float(np.linalg.norm(u))
    if nu <= EPS_GRAD:
        raise DegenerateGradient("first", nu)
    nv = float(np.linalg.norm(v))
    if nv <= EPS_GRAD:
        raise DegenerateGradient("second", nv)
    cos = float(np.dot(u, v)) / (nu * nv)
    cos = min(1.0, max(-1.0, cos))
    return float(np.degrees(np.arccos(cos)))


def dominates(a, b) -> bool:
    """True iff a is componentwise <= b with at least one strict improvement."""
    a1, a2 = a
    b1, b2 = b
    return a1 <= b1 and a2 <= b2 and (a1 < b1 or a2 < b2)


def fritz_john_residual(g1: Array, g2: Array, v: tuple[float, float]) -> float:
    """Norm of the v-weighted gradient combination; 0 at a Fritz John point."""
    v1, v2 = float(v[0]), float(v[1])
    if v1 < 0.0 or v2 < 0.0 or abs(v1 + v2 - 1.0) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to 1")
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    return float(np.linalg.norm(v1 * g1 + v2 * g2))
