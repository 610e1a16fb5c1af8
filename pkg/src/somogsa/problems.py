"""Single-objective test problems: sphere, Rastrigin, Gallagher-style peaks.

Evaluators are pure functions over numpy arrays.  Each problem carries its box
constraints and, where available, an analytic gradient; black-box use goes
through central finite differences with one-sided fallback at the box faces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Array = np.ndarray


@dataclass(frozen=True)
class Box:
    """Axis-aligned box constraints l <= x <= u."""

    lower: Array
    upper: Array

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("box bounds must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("box requires lower < upper componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x: Array) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def clamp(self, x: Array) -> Array:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)


@dataclass(frozen=True)
class ScalarProblem:
    """A single-objective problem: evaluator, box, optional analytic gradient.

    ``gradient`` is None for black-box problems; callers then fall back to
    :func:`finite_diff_grad`.  ``known_optimum`` is (argmin, min value) when
    the construction makes it known.
    """

    name: str
    dim: int
    box: Box
    value: Callable[[Array], float]
    gradient: Optional[Callable[[Array], Array]] = None
    known_optimum: Optional[tuple[Array, float]] = None

    @property
    def gradient_kind(self) -> str:
        return "analytic" if self.gradient is not None else "finite-difference"


@dataclass(frozen=True)
class GallagherSpec:
    """Generated peak data: centers (k,n), heights (k,), isotropic widths (k,)."""

    num_peaks: int
    seed: int
    centers: Array
    heights: Array
    widths: Array


def _check_same_dim(x: Array, s: Array) -> tuple[Array, Array]:
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.shape != s.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {s.shape}")
    return x, s


def eval_sphere(x: Array, s: Array) -> float:
    """Sum of squared offsets from the center s."""
    x, s = _check_same_dim(x, s)
    d = x - s
    return float(d @ d)


def grad_sphere(x: Array, s: Array) -> Array:
    x, s = _check_same_dim(x, s)
    return 2.0 * (x - s)


def eval_rastrigin(x: Array) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def grad_rastrigin(x: Array) -> Array:
    x = np.asarray(x, dtype=float)
    return 2.0 * x + 20.0 * np.pi * np.sin(2.0 * np.pi * x)


def _peak_values(spec: GallagherSpec, x: Array) -> Array:
    d = spec.centers - x
    sq = np.einsum("ij,ij->i", d, d)
    return spec.heights * np.exp(-sq / (2.0 * spec.widths**2))


def eval_gallagher(spec: GallagherSpec, x: Array) -> float:
    """Min-convention peaks landscape: h_max - max_i h_i exp(-|x-y_i|^2 / 2 w_i^2)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.centers.shape[1],):
        raise ValueError("dimension mismatch with peak centers")
    return float(np.max(spec.heights) - np.max(_peak_values(spec, x)))


def grad_gallagher(spec: GallagherSpec, x: Array) -> Array:
    """Gradient of the active (maximal) peak; lowest index wins ties."""
    x = np.asarray(x, dtype=float)
    vals = _peak_values(spec, x)
    a = int(np.argmax(vals))
    return vals[a] * (x - spec.centers[a]) / spec.widths[a] ** 2


def build_gallagher(num_peaks: int, seed: int, box: Box) -> ScalarProblem:
    """Generate a seeded peaks problem inside ``box``.

    Peak 0 gets the strictly maximal height (10 vs. the rest in [1.1, 9.1]),
    so the global optimum sits exactly at centers[0] with value 0.  Widths in
    [1.0, 2.2] keep the active-peak gradient numerically well conditioned.
    """
    if num_peaks < 1:
        raise ValueError("num_peaks must be >= 1")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(box.lower, box.upper, size=(num_peaks, box.dim))
    heights = rng.uniform(1.1, 9.1, size=num_peaks)
    heights[0] = 10.0
    widths = rng.uniform(1.0, 2.2, size=num_peaks)
    spec = GallagherSpec(num_peaks, seed, centers, heights, widths)
    return ScalarProblem(
        name=f"gallagher{num_peaks}:{seed}",
        dim=box.dim,
        box=box,
        value=lambda x: eval_gallagher(spec, x),
        gradient=lambda x: grad_gallagher(spec, x),
        known_optimum=(centers[0].copy(), 0.0),
    )


def finite_diff_grad(problem: ScalarProblem, x: Array, h: float | None = None,
                     return_mask: bool = False):
    """Central-difference gradient of ``problem.value`` at x.

    Step per component is ``h`` if given, else 1e-6 * max(1, |x_i|).  Within a
    step of a box face the difference switches to a one-sided quotient; with
    ``return_mask`` the boolean mask of one-sided components is returned too.
    Interior points cost exactly 2n evaluations.
    """
    x = np.asarray(x, dtype=float)
    f = problem.value
    box = problem.box
    if h is None:
        steps = 1e-6 * np.maximum(1.0, np.abs(x))
    else:
        steps = np.full(x.size, float(h))
    grad = np.empty_like(x)
    one_sided = np.zeros(x.size, dtype=bool)
    f0 = None  # evaluated lazily, only when some component needs a one-sided step
    for i in range(x.size):
        hi = steps[i]
        up_ok = x[i] + hi <= box.upper[i]
        dn_ok = x[i] - hi >= box.lower[i]
        if up_ok and dn_ok:
            xp = x.copy()
            xp[i] += hi
            xm = x.copy()
            xm[i] -= hi
            grad[i] = (f(xp) - f(xm)) / (2.0 * hi)
            continue
        one_sided[i] = True
        if f0 is None:
            f0 = f(x)
        if up_ok:
            xp = x.copy()
            xp[i] += hi
            grad[i] = (f(xp) - f0) / hi
        else:
            xm = x.copy()
            xm[i] -= hi
            grad[i] = (f0 - f(xm)) / hi
    if return_mask:
        return grad, one_sided
    return grad


def relative_gradient_error(g_analytic: Array, g_fd: Array) -> float:
    """|ga - gfd| / max(|ga|, |gfd|) with a tiny floor against 0/0."""
    ga = np.asarray(g_analytic, dtype=float)
    gf = np.asarray(g_fd, dtype=float)
    denom = max(float(np.linalg.norm(ga)), float(np.linalg.norm(gf)), 1e-12)
    return float(np.linalg.norm(ga - gf) / denom)


def default_box(dim: int = 2) -> Box:
    return Box(np.full(dim, -5.0), np.full(dim, 5.0))


def make_problem(problem_id: str) -> ScalarProblem:
    """Build a problem from its string id.

    Known ids: ``sphere``, ``rastrigin``, ``gallagher21:<seed>`` and
    ``gallagher101:<seed>`` (seed defaults to 1 when omitted).  All are 2-d
    on the box [-5, 5]^2.
    """
    pid = problem_id.strip()
    box = default_box(2)
    if pid == "sphere":
        center = np.zeros(2)
        return ScalarProblem(
            name="sphere",
            dim=2,
            box=box,
            value=lambda x: eval_sphere(x, center),
            gradient=lambda x: grad_sphere(x, center),
            known_optimum=(center, 0.0),
        )
    if pid == "rastrigin":
        return ScalarProblem(
            name="rastrigin",
            dim=2,
            box=box,
            value=eval_rastrigin,
            gradient=grad_rastrigin,
            known_optimum=(np.zeros(2), 0.0),
        )
    if pid.startswith("gallagher"):
        head, sep, seed_text = pid.partition(":")
        try:
            num_peaks = int(head[len("gallagher"):])
        except ValueError:
            raise ValueError(f"unknown problem id: {problem_id!r}") from None
        seed = int(seed_text) if sep else 1
        return build_gallagher(num_peaks, seed, box)
    raise ValueError(f"unknown problem id: {problem_id!r}")
