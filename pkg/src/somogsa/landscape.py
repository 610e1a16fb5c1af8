"""Grid landscape analysis of the bi-objective structure.

The box is discretized into regular cells; each cell center carries the
combined normalized gradient of (f1, f2), an efficiency flag (combined
gradient approximately zero, or a single-objective gradient that vanishes at
grid scale), an accumulated descent height toward the attracting efficient
cells, and a dominance count among all efficient cells.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .biobj import EPS_GRAD, BiObjectiveProblem
from .problems import Array, Box

DEFAULT_TAU = 0.1

# neighbor enumeration order; ties in the descent direction pick the lowest index
NEIGHBOR_OFFSETS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


@dataclass(frozen=True)
class GridSpec:
    """Regular cell grid over a 2-d box; centers at lower + (index + 1/2) * width."""

    box: Box
    resolution: tuple[int, int]

    def __post_init__(self):
        if self.box.dim != 2:
            raise ValueError("grid landscapes are 2-d")
        rx, ry = self.resolution
        if rx < 2 or ry < 2:
            raise ValueError("resolution must be at least 2 cells per axis")
        object.__setattr__(self, "resolution", (int(rx), int(ry)))

    @property
    def widths(self) -> Array:
        return (self.box.upper - self.box.lower) / np.asarray(self.resolution, dtype=float)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.widths))

    def centers(self, axis: int) -> Array:
        n = self.resolution[axis]
        w = self.widths[axis]
        return self.box.lower[axis] + (np.arange(n) + 0.5) * w

    def cell_center(self, ix: int, iy: int) -> Array:
        w = self.widths
        return self.box.lower + (np.array([ix, iy], dtype=float) + 0.5) * w


def build_grid(box: Box, resolution: tuple[int, int]) -> GridSpec:
    return GridSpec(box, resolution)


@dataclass
class PlotField:
    """Per-cell landscape data; arrays are indexed [ix, iy]."""

    grid: GridSpec
    mo_grad: Array  # (rx, ry, 2)
    grad_norm: Array  # (rx, ry)
    degenerate: Array  # (rx, ry) bool: a single-objective gradient vanished
    f1: Array
    f2: Array
    efficient: Array | None = None
    height: Array | None = None
    path_ok: Array | None = None  # false where the descent path cycled / left the box
    successor: Array | None = None  # flat cell index of the next path cell, -1 at stops
    dominance_count: Array | None = None  # -1 for non-efficient cells

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.resolution


def mo_gradient_field(P: BiObjectiveProblem, grid: GridSpec,
                      vanish_tol: float | None = None) -> PlotField:
    """Evaluate the combined normalized gradient at every cell center.

    The degenerate marker locates, per objective, the cell holding that
    objective's optimum: among cells whose single-objective gradient norm is
    at or below ``vanish_tol`` (by default the cell diagonal — the gradient
    vanishes somewhere at the scale of the cell), the one with the smallest
    norm is marked.  Near-ties are broken by the smaller other-objective
    value, then by lowest cell index, so an optimum sitting on a shared cell
    corner marks the corner cell that no other cell dominates.  One marker
    per objective presumes a single optimum, which holds for the sphere
    helper; extra critical cells of a multimodal objective are picked up by
    the efficiency threshold where the combined gradient is short.  Cells
    whose gradient is numerically zero keep a zero combined gradient.
    """
    if vanish_tol is None:
        vanish_tol = grid.diagonal * (1.0 + 1e-9)
    rx, ry = grid.resolution
    mo = np.zeros((rx, ry, 2))
    norms = np.zeros((rx, ry))
    n1s = np.zeros((rx, ry))
    n2s = np.zeros((rx, ry))
    f1 = np.zeros((rx, ry))
    f2 = np.zeros((rx, ry))
    for ix in range(rx):
        for iy in range(ry):
            x = grid.cell_center(ix, iy)
            f1[ix, iy] = P.f1_value(x)
            f2[ix, iy] = P.f2_value(x)
            g1 = P.grad_f1(x)
            g2 = P.grad_f2(x)
            n1 = float(np.linalg.norm(g1))
            n2 = float(np.linalg.norm(g2))
            n1s[ix, iy] = n1
            n2s[ix, iy] = n2
            if n1 <= EPS_GRAD or n2 <= EPS_GRAD:
                continue  # combined gradient undefined; cell stays at zero
            combined = g1 / n1 + g2 / n2
            mo[ix, iy] = combined
            norms[ix, iy] = float(np.linalg.norm(combined))
    degenerate = np.zeros((rx, ry), dtype=bool)
    for norm_grid, other_values in ((n1s, f2), (n2s, f1)):
        flat = norm_grid.reshape(-1)
        hits = np.flatnonzero(flat <= vanish_tol)
        if hits.size:
            # the sub-threshold cell with the smallest norm is the best grid
            # estimate of where the gradient vanishes; near-ties (an optimum
            # sitting on a shared cell corner puts equidistant centers within
            # rounding of each other) are broken by the other objective's
            # value so the marked cell is never a dominated one, then by
            # lowest flat index
            m = flat[hits].min()
            tied = hits[flat[hits] <= m * (1.0 + 1e-9)]
            winner = tied[np.argmin(other_values.reshape(-1)[tied])]
            degenerate[np.unravel_index(winner, degenerate.shape)] = True
    return PlotField(grid, mo, norms, degenerate, f1, f2)


def detect_efficient_cells(field: PlotField, tau: float = DEFAULT_TAU) -> PlotField:
    """Flag cells whose combined gradient is short (<= tau) or degenerate."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    field.efficient = (field.grad_norm <= tau) | field.degenerate
    return field


def _successors(field: PlotField) -> Array:
    """Pick, per cell, the 8-neighbor best aligned with the descent direction.

    Returns flat indices (ix * ry + iy); -1 where the best-aligned neighbor
    falls outside the grid (the path would leave the box).
    """
    grid = field.grid
    rx, ry = grid.resolution
    w = grid.widths
    dirs = np.array(NEIGHBOR_OFFSETS, dtype=float) * w  # physical offsets
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    # score[k] = cos of angle between neighbor direction k and -mo_grad
    descent = -field.mo_grad
    scores = np.einsum("xyc,kc->xyk", descent, dirs)
    best = np.argmax(scores, axis=2)  # first maximum = lowest neighbor index
    succ = np.full((rx, ry), -1, dtype=np.int64)
    for ix in range(rx):
        for iy in range(ry):
            dx, dy = NEIGHBOR_OFFSETS[best[ix, iy]]
            jx, jy = ix + dx, iy + dy
            if 0 <= jx < rx and 0 <= jy < ry:
                succ[ix, iy] = jx * ry + jy
    return succ


def accumulate_heights(field: PlotField) -> PlotField:
    """Sum gradient norms along each cell's discrete descent path.

    Height is zero exactly on efficient cells.  A non-efficient cell's height
    is its own gradient norm plus the height of its successor.  Paths that
    revisit a cell or leave the box stop there: the stop cell keeps only its
    own norm, its successor link is cut, and the whole path is flagged.
    """
    if field.efficient is None:
        raise ValueError("run detect_efficient_cells first")
    rx, ry = field.grid.resolution
    succ = _successors(field)
    efficient = field.efficient.reshape(-1)
    gnorm = field.grad_norm.reshape(-1)
    succ_flat = succ.reshape(-1)
    n = rx * ry

    height = np.zeros(n)
    path_ok = np.ones(n, dtype=bool)
    state = np.zeros(n, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    state[efficient] = 2
    succ_flat[efficient] = -1

    for start in range(n):
        if state[start] == 2:
            continue
        path = []
        c = start
        # walk until something already resolved (or a stop) is found
        while True:
            if state[c] == 2:
                base_h, base_ok = height[c], path_ok[c]
                break
            if state[c] == 1:
                # cycle: c is on the current path; cut the link there
                height[c] = gnorm[c]
                path_ok[c] = False
                succ_flat[c] = -1
                state[c] = 2
                path.remove(c)
                base_h, base_ok = height[c], False
                break
            state[c] = 1
            path.append(c)
            nxt = succ_flat[c]
            if nxt < 0:
                # leaving the box: stop at c with its own norm
                height[c] = gnorm[c]
                path_ok[c] = False
                state[c] = 2
                path.pop()
                base_h, base_ok = height[c], False
                break
            c = nxt
        for c in reversed(path):
            base_h = gnorm[c] + base_h
            height[c] = base_h
            path_ok[c] = base_ok
            state[c] = 2

    field.height = height.reshape(rx, ry)
    field.path_ok = path_ok.reshape(rx, ry)
    field.successor = succ_flat.reshape(rx, ry)
    return field


def dominance_counts(field: PlotField) -> PlotField:
    """Count, per efficient cell, how many efficient cells dominate it."""
    if field.efficient is None:
        raise ValueError("run detect_efficient_cells first")
    rx, ry = field.grid.resolution
    counts = np.full((rx, ry), -1, dtype=np.int64)
    mask = field.efficient
    f1 = field.f1[mask]
    f2 = field.f2[mask]
    k = f1.size
    out = np.zeros(k, dtype=np.int64)
    # blockwise k x k comparison keeps memory flat for large k
    block = 512
    for lo in range(0, k, block):
        hi = min(lo + block, k)
        le1 = f1[None, :] <= f1[lo:hi, None]
        le2 = f2[None, :] <= f2[lo:hi, None]
        st = (f1[None, :] < f1[lo:hi, None]) | (f2[None, :] < f2[lo:hi, None])
        out[lo:hi] = (le1 & le2 & st).sum(axis=1)
    counts[mask] = out
    field.dominance_count = counts
    return field


def compute_field(P: BiObjectiveProblem, grid: GridSpec, tau: float = DEFAULT_TAU,
                  vanish_tol: float | None = None) -> PlotField:
    """Full pipeline: gradients, efficiency, heights, dominance counts."""
    field = mo_gradient_field(P, grid, vanish_tol)
    detect_efficient_cells(field, tau)
    accumulate_heights(field)
    dominance_counts(field)
    return field


def write_field_csv(field: PlotField, path: str) -> None:
    """Dump the field, one row per cell: ix,iy,x1,x2,f1,f2,mograd_norm,efficient,height,domcount."""
    if field.height is None or field.dominance_count is None:
        raise ValueError("field is incomplete; run the full pipeline first")
    rx, ry = field.grid.resolution
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ix", "iy", "x1", "x2", "f1", "f2",
                         "mograd_norm", "efficient", "height", "domcount"])
        for ix in range(rx):
            for iy in range(ry):
                x = field.grid.cell_center(ix, iy)
                eff = bool(field.efficient[ix, iy])
                dom = int(field.dominance_count[ix, iy])
                writer.writerow([
                    ix, iy,
                    repr(float(x[0])), repr(float(x[1])),
                    repr(float(field.f1[ix, iy])), repr(float(field.f2[ix, iy])),
                    repr(float(field.grad_norm[ix, iy])),
                    int(eff),
                    repr(float(field.height[ix, iy])),
                    dom if eff else "",
                ])
    os.replace(tmp, path)
