"""Deterministic raster rendering of landscape fields, traces, and markers.

Images are drawn into numpy arrays and PIL images pixel by pixel — no
plotting library — so byte-identical output for identical inputs is
guaranteed.  Decision-space images put x1 on the horizontal axis (left =
lower bound) and x2 on the vertical axis (top = upper bound).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from .landscape import GridSpec, PlotField
from .problems import Array, ScalarProblem
from .trace import SearchTrace

# overlay palette: at least six well-separated colors, none pure black
PATH_COLORS: tuple[tuple[int, int, int], ...] = (
    (228, 26, 28),    # red
    (55, 126, 184),   # blue
    (77, 175, 74),    # green
    (255, 127, 0),    # orange
    (152, 78, 163),   # purple
    (0, 213, 255),    # cyan
    (166, 86, 40),    # brown
    (247, 129, 191),  # pink
)

DARK_BLUE = (0, 0, 139)  # non-dominated efficient cells
DARK_RED = (139, 0, 0)   # most dominated efficient cells


@dataclass(frozen=True)
class RenderStyle:
    """Deterministic mapping from field values to pixel colors."""

    pixels_per_cell: int = 4
    height_scale: str = "log"  # "log" -> log(1+h) ramp, else linear
    gray_range: tuple[int, int] = (40, 235)  # dark (low height) .. light (high)
    dominance_low: tuple[int, int, int] = DARK_BLUE
    dominance_high: tuple[int, int, int] = DARK_RED
    path_colors: tuple[tuple[int, int, int], ...] = PATH_COLORS
    marker_fill: tuple[int, int, int] = (255, 255, 255)
    marker_outline: tuple[int, int, int] = (0, 0, 0)
    marker_radius: int = 6

    def __post_init__(self):
        if self.pixels_per_cell < 1:
            raise ValueError("pixels_per_cell must be a positive integer")
        if self.height_scale not in ("log", "linear"):
            raise ValueError("height_scale must be 'log' or 'linear'")
        lo, hi = self.gray_range
        if not (0 <= lo <= hi <= 255):
            raise ValueError("gray_range must be an increasing pair within 0..255")
        if len(self.path_colors) < 6:
            raise ValueError("need at least six path colors")


def _ramp01(values: Array, scale: str) -> Array:
    """Normalize nonnegative values to [0, 1]; log(1+v) compresses by default."""
    v = np.log1p(values) if scale == "log" else np.asarray(values, dtype=float)
    top = float(v.max()) if v.size else 0.0
    if top <= 0.0:
        return np.zeros_like(v)
    return v / top


def _cell_colors(field: PlotField, style: RenderStyle) -> Array:
    """Per-cell RGB: gray height ramp off the efficient set, blue->red on it."""
    rx, ry = field.shape
    colors = np.zeros((rx, ry, 3), dtype=np.uint8)

    eff = field.efficient
    lo, hi = style.gray_range
    t = _ramp01(np.where(eff, 0.0, field.height), style.height_scale)
    gray = np.rint(lo + (hi - lo) * t).astype(np.uint8)
    colors[..., 0] = gray
    colors[..., 1] = gray
    colors[..., 2] = gray

    counts = field.dominance_count
    max_count = int(counts[eff].max()) if eff.any() else 0
    frac = np.zeros((rx, ry))
    if max_count > 0:
        frac[eff] = counts[eff] / max_count
    c_lo = np.asarray(style.dominance_low, dtype=float)
    c_hi = np.asarray(style.dominance_high, dtype=float)
    blend = c_lo[None, None, :] + (c_hi - c_lo)[None, None, :] * frac[..., None]
    colors[eff] = np.rint(blend[eff]).astype(np.uint8)
    return colors


def _to_image(colors: Array, ppc: int) -> Image.Image:
    """Cell color array [ix, iy, 3] -> upscaled PIL image, x2 increasing upward."""
    img = np.transpose(colors, (1, 0, 2))[::-1, :, :]  # rows = x2 descending
    img = np.repeat(np.repeat(img, ppc, axis=0), ppc, axis=1)
    return Image.fromarray(np.ascontiguousarray(img), mode="RGB")


def _world_to_px(grid: GridSpec, ppc: int):
    lower, upper = grid.box.lower, grid.box.upper
    span = upper - lower
    width = grid.resolution[0] * ppc
    height = grid.resolution[1] * ppc

    def to_px(point) -> tuple[float, float]:
        p = np.asarray(point, dtype=float)
        px = (p[0] - lower[0]) / span[0] * width
        py = (upper[1] - p[1]) / span[1] * height
        return (float(np.clip(px, 0, width - 1)), float(np.clip(py, 0, height - 1)))

    return to_px


def _trace_points(trace) -> list[Array]:
    if isinstance(trace, SearchTrace):
        return [e.point for e in trace.entries]
    return [np.asarray(p, dtype=float) for p in trace]


def _draw_marker(draw: ImageDraw.ImageDraw, px: tuple[float, float], glyph: str,
                 style: RenderStyle) -> None:
    x, y = px
    r = style.marker_radius
    if glyph == "circle":
        draw.ellipse([x - r, y - r, x + r, y + r],
                     fill=style.marker_fill, outline=style.marker_outline, width=2)
    elif glyph == "triangle":
        draw.polygon([(x, y - r), (x - r, y + r), (x + r, y + r)],
                     fill=style.marker_fill, outline=style.marker_outline)
    else:
        raise ValueError(f"unknown marker glyph: {glyph!r}")


def _draw_overlays(img: Image.Image, grid: GridSpec, style: RenderStyle,
                   overlays, markers) -> None:
    draw = ImageDraw.Draw(img)
    to_px = _world_to_px(grid, style.pixels_per_cell)
    for i, trace in enumerate(overlays):
        color = style.path_colors[i % len(style.path_colors)]
        pts = [to_px(p) for p in _trace_points(trace)]
        if len(pts) >= 2:
            draw.line(pts, fill=color, width=1)
        elif len(pts) == 1:
            draw.point(pts, fill=color)
    for point, glyph in markers:
        _draw_marker(draw, to_px(point), glyph, style)


def render_plot(field: PlotField, style: RenderStyle | None = None,
                overlays=(), markers=()) -> Image.Image:
    """Landscape image: height grays, dominance colors, trace/marker overlays."""
    if field.efficient is None or field.height is None or field.dominance_count is None:
        raise ValueError("field is incomplete; run the full pipeline first")
    style = style or RenderStyle()
    img = _to_image(_cell_colors(field, style), style.pixels_per_cell)
    _draw_overlays(img, field.grid, style, overlays, markers)
    return img


def render_decision_space(f: ScalarProblem, grid: GridSpec,
                          overlays=(), markers=(),
                          style: RenderStyle | None = None) -> Image.Image:
    """Single-objective heatmap at cell centers, dark = low, plus overlays."""
    style = style or RenderStyle()
    rx, ry = grid.resolution
    vals = np.zeros((rx, ry))
    for ix in range(rx):
        for iy in range(ry):
            vals[ix, iy] = f.value(grid.cell_center(ix, iy))
    t = _ramp01(vals - vals.min(), style.height_scale)
    lo, hi = style.gray_range
    gray = np.rint(lo + (hi - lo) * t).astype(np.uint8)
    colors = np.stack([gray, gray, gray], axis=-1)
    img = _to_image(colors, style.pixels_per_cell)
    _draw_overlays(img, grid, style, overlays, markers)
    return img


OBJECTIVE_CANVAS = (480, 360)
OBJECTIVE_MARGIN = 0.05


def render_objective_space(field: PlotField, trace: SearchTrace | None,
                           f1_best_line: float,
                           style: RenderStyle | None = None) -> Image.Image:
    """Objective-space view: efficient-cell scatter, trace path, best-f1 line."""
    if field.efficient is None or field.dominance_count is None:
        raise ValueError("field is incomplete; run the full pipeline first")
    style = style or RenderStyle()
    width, height = OBJECTIVE_CANVAS

    eff = field.efficient
    scatter_f1 = field.f1[eff]
    scatter_f2 = field.f2[eff]
    counts = field.dominance_count[eff]
    trace_pairs = ([(e.objectives.f1_value, e.objectives.f2_value)
                    for e in trace.entries] if trace is not None else [])
    trace_pairs = [p for p in trace_pairs if np.isfinite(p).all()]

    xs = np.concatenate([scatter_f1, [p[0] for p in trace_pairs], [f1_best_line]]) \
        if (scatter_f1.size or trace_pairs) else np.array([f1_best_line, f1_best_line + 1.0])
    ys = np.concatenate([scatter_f2, [p[1] for p in trace_pairs]]) \
        if (scatter_f2.size or trace_pairs) else np.array([0.0, 1.0])

    def axis(vmin, vmax):
        span = vmax - vmin
        pad = OBJECTIVE_MARGIN * (span if span > 0 else max(abs(vmax), 1.0))
        return vmin - pad, vmax + pad

    x_lo, x_hi = axis(float(xs.min()), float(xs.max()))
    y_lo, y_hi = axis(float(ys.min()), float(ys.max()))

    def to_px(fx, fy):
        px = (fx - x_lo) / (x_hi - x_lo) * (width - 1)
        py = (y_hi - fy) / (y_hi - y_lo) * (height - 1)
        return (float(np.clip(px, 0, width - 1)), float(np.clip(py, 0, height - 1)))

    img = Image.new("RGB", (width, height), (255, 255, 255))
    draw = ImageDraw.Draw(img)

    max_count = int(counts.max()) if counts.size else 0
    c_lo = np.asarray(style.dominance_low, dtype=float)
    c_hi = np.asarray(style.dominance_high, dtype=float)
    for fx, fy, c in zip(scatter_f1, scatter_f2, counts):
        frac = c / max_count if max_count > 0 else 0.0
        rgb = tuple(int(round(v)) for v in c_lo + (c_hi - c_lo) * frac)
        px, py = to_px(fx, fy)
        draw.ellipse([px - 2, py - 2, px + 2, py + 2], fill=rgb)

    if len(trace_pairs) >= 2:
        draw.line([to_px(*p) for p in trace_pairs],
                  fill=style.path_colors[0], width=1)
    elif len(trace_pairs) == 1:
        draw.point([to_px(*trace_pairs[0])], fill=style.path_colors[0])

    line_x = to_px(f1_best_line, 0.0)[0]
    draw.line([(line_x, 0), (line_x, height - 1)], fill=(0, 0, 0), width=1)
    return img


def save_image(img: Image.Image, path: str) -> None:
    """Write a lossless raster (.png or .ppm) atomically."""
    ext = os.path.splitext(path)[1].lower()
    if ext not in (".png", ".ppm"):
        raise ValueError(f"unsupported image extension: {ext!r} (use .png or .ppm)")
    tmp = path + ".tmp"
    img.save(tmp, format="PNG" if ext == ".png" else "PPM")
    os.replace(tmp, path)
