"""Tests for the grid landscape analysis (field, efficiency, heights, dominance)."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from somogsa.biobj import dominates, make_biobjective, mo_gradient
from somogsa.landscape import (
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
from somogsa.problems import Box, default_box, make_problem

S = np.array([-3.5, -2.5])


@pytest.fixture(scope="module")
def bi_sphere():
    return make_biobjective(make_problem("sphere"), S)


@pytest.fixture(scope="module")
def bi_sphere_field(bi_sphere):
    """Full pipeline on the reference geometry: sphere at 0 vs sphere at S, 100x100."""
    grid = build_grid(bi_sphere.box, (100, 100))
    return compute_field(bi_sphere, grid)


def small_field(f1=None, f2=None, mo=None, gnorm=None, res=(2, 2), side=2.0):
    """Hand-assembled PlotField on a [0,side]^2 box for unit-level checks."""
    rx, ry = res
    box = Box(np.zeros(2), np.full(2, float(side)))
    grid = build_grid(box, res)
    shape = (rx, ry)
    return PlotField(
        grid,
        np.zeros(shape + (2,)) if mo is None else np.asarray(mo, dtype=float),
        np.zeros(shape) if gnorm is None else np.asarray(gnorm, dtype=float),
        np.zeros(shape, dtype=bool),
        np.zeros(shape) if f1 is None else np.asarray(f1, dtype=float),
        np.zeros(shape) if f2 is None else np.asarray(f2, dtype=float),
    )


# ---------------------------------------------------------------- grid basics


def test_grid_widths_and_centers_default_box():
    grid = build_grid(default_box(), (100, 100))
    assert np.allclose(grid.widths, [0.1, 0.1])
    cx = grid.centers(0)
    assert cx.shape == (100,)
    assert cx[0] == pytest.approx(-4.95)
    assert cx[-1] == pytest.approx(4.95)
    assert np.allclose(grid.cell_center(49, 49), [-0.05, -0.05])
    assert grid.diagonal == pytest.approx(np.hypot(0.1, 0.1))


def test_grid_rectangular_box_widths():
    box = Box(np.array([-5.0, 0.0]), np.array([5.0, 10.0]))
    grid = build_grid(box, (10, 20))
    assert np.allclose(grid.widths, [1.0, 0.5])
    assert np.allclose(grid.cell_center(0, 0), [-4.5, 0.25])


def test_grid_rejects_single_cell_axis():
    with pytest.raises(ValueError):
        build_grid(default_box(), (1, 100))


def test_grid_rejects_non_2d_box():
    with pytest.raises(ValueError):
        build_grid(default_box(3), (10, 10))


def test_cell_center_matches_axis_centers():
    grid = build_grid(default_box(), (20, 50))
    c = grid.cell_center(3, 41)
    assert c[0] == grid.centers(0)[3]
    assert c[1] == grid.centers(1)[41]


# ------------------------------------------------------------- gradient field


def test_field_array_shapes(bi_sphere):
    grid = build_grid(bi_sphere.box, (20, 30))
    field = mo_gradient_field(bi_sphere, grid)
    assert field.shape == (20, 30)
    assert field.mo_grad.shape == (20, 30, 2)
    assert field.grad_norm.shape == (20, 30)
    assert field.degenerate.shape == (20, 30)
    assert field.efficient is None and field.height is None


def test_combined_gradient_norm_bounded_by_two(bi_sphere_field):
    assert float(bi_sphere_field.grad_norm.max()) <= 2.0 + 1e-12


def test_field_matches_pointwise_combined_gradient(bi_sphere):
    grid = build_grid(bi_sphere.box, (25, 25))
    field = mo_gradient_field(bi_sphere, grid)
    for ix, iy in [(0, 0), (7, 19), (24, 3)]:
        x = grid.cell_center(ix, iy)
        expected = mo_gradient(bi_sphere, x)
        assert np.array_equal(field.mo_grad[ix, iy], expected)
        assert field.f1[ix, iy] == bi_sphere.f1_value(x)
        assert field.f2[ix, iy] == bi_sphere.f2_value(x)


def test_norm_small_near_segment_large_far_away(bi_sphere_field):
    grid = bi_sphere_field.grid
    # (-0.35, -0.25) lies on the segment between the two minima
    on_segment = bi_sphere_field.grad_norm[46, 47]
    assert np.allclose(grid.cell_center(46, 47), [-0.35, -0.25])
    far = bi_sphere_field.grad_norm[95, 5]
    assert on_segment < 1e-10
    assert far > 1.0


def test_degenerate_markers_reference_grid(bi_sphere_field):
    marked = {tuple(ij) for ij in np.argwhere(bi_sphere_field.degenerate)}
    # one marker per objective: the f1 minimum (origin) and the f2 minimum (S)
    # each sit on a shared cell corner; the marked cell is the equidistant
    # candidate whose other-objective value is smallest
    assert marked == {(49, 49), (15, 25)}
    assert np.allclose(bi_sphere_field.grid.cell_center(49, 49), [-0.05, -0.05])
    assert np.allclose(bi_sphere_field.grid.cell_center(15, 25), [-3.45, -2.45])


def test_degenerate_marker_optimum_on_cell_center(bi_sphere):
    # on a 10x10 grid the helper center S is itself a cell center, so the
    # f2 marker lands exactly there; the f1 optimum is on a 4-cell corner and
    # the tie resolves to the candidate nearest S
    grid = build_grid(bi_sphere.box, (10, 10))
    field = mo_gradient_field(bi_sphere, grid)
    marked = {tuple(ij) for ij in np.argwhere(field.degenerate)}
    assert marked == {(1, 2), (4, 4)}
    assert np.array_equal(grid.cell_center(1, 2), S)
    assert np.allclose(grid.cell_center(4, 4), [-0.5, -0.5])


def test_degenerate_empty_for_tiny_tolerance(bi_sphere):
    grid = build_grid(bi_sphere.box, (100, 100))
    field = mo_gradient_field(bi_sphere, grid, vanish_tol=1e-12)
    assert not field.degenerate.any()


# ------------------------------------------------------------ efficient cells


def test_detect_rejects_non_positive_tau(bi_sphere):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = mo_gradient_field(bi_sphere, grid)
    with pytest.raises(ValueError):
        detect_efficient_cells(field, tau=0.0)


def test_all_cells_efficient_with_large_tau(bi_sphere):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = detect_efficient_cells(mo_gradient_field(bi_sphere, grid), tau=2.01)
    assert field.efficient.all()


def test_degenerate_cells_always_efficient(bi_sphere):
    grid = build_grid(bi_sphere.box, (100, 100))
    field = detect_efficient_cells(mo_gradient_field(bi_sphere, grid), tau=1e-9)
    assert field.efficient[field.degenerate].all()


def test_efficient_is_union_of_short_norm_and_degenerate(bi_sphere_field):
    expected = (bi_sphere_field.grad_norm <= 0.1) | bi_sphere_field.degenerate
    assert np.array_equal(bi_sphere_field.efficient, expected)


# ------------------------------------------------------- descent paths/heights


def test_successor_descends_both_gradients_at_far_corner(bi_sphere_field):
    # at (4.95, 4.95) both gradients point up-right, so the descent path
    # moves diagonally down-left
    succ = bi_sphere_field.successor[99, 99]
    assert succ == 98 * 100 + 98


def test_successor_tie_breaks_to_lowest_neighbor_index():
    # zero combined gradient scores every neighbor equally; the first
    # enumerated offset (-1, -1) wins
    field = small_field(res=(3, 3), side=3.0)
    field.efficient = np.zeros((3, 3), dtype=bool)
    accumulate_heights(field)
    assert field.successor[1, 1] == 0
    assert field.successor[2, 2] == 1 * 3 + 1
    # border cells would step outside and stop instead
    assert field.successor[0, 0] == -1
    assert not field.path_ok[0, 0]


def test_cycle_detection_truncates_and_flags():
    # (0,0) and (0,1) chase each other; (1,0) and (1,1) feed into them
    mo = np.zeros((2, 2, 2))
    mo[0, 0] = [0.0, -1.0]   # descent +y -> (0,1)
    mo[0, 1] = [0.0, 1.0]    # descent -y -> (0,0)
    mo[1, 0] = [1.0, 0.0]    # descent -x -> (0,0)
    mo[1, 1] = [1.0, 0.0]    # descent -x -> (0,1)
    field = small_field(mo=mo, gnorm=np.ones((2, 2)))
    field.efficient = np.zeros((2, 2), dtype=bool)
    accumulate_heights(field)
    # the revisited cell keeps only its own norm and loses its link
    assert field.height[0, 0] == 1.0
    assert field.successor[0, 0] == -1
    assert field.height[0, 1] == 2.0
    assert field.successor[0, 1] == 0
    assert field.height[1, 0] == 2.0
    assert field.height[1, 1] == 3.0
    assert not field.path_ok.any()


def test_box_edge_stop_keeps_own_norm():
    mo = np.zeros((2, 2, 2))
    mo[:, :] = [-1.0, 0.0]  # descent +x: rightmost cells step outside
    field = small_field(mo=mo, gnorm=np.full((2, 2), 0.25))
    field.efficient = np.zeros((2, 2), dtype=bool)
    accumulate_heights(field)
    assert field.height[1, 0] == 0.25
    assert field.successor[1, 0] == -1
    assert not field.path_ok[1, 0]
    assert field.height[0, 0] == 0.5
    assert field.successor[0, 0] == 1 * 2 + 0


def test_efficient_cells_have_zero_height_and_no_successor():
    field = small_field(gnorm=np.ones((2, 2)))
    field.efficient = np.array([[True, False], [False, True]])
    accumulate_heights(field)
    assert field.height[0, 0] == 0.0
    assert field.height[1, 1] == 0.0
    assert field.successor[0, 0] == -1
    assert field.successor[1, 1] == -1
    assert field.path_ok[0, 0]


def test_accumulate_requires_detection_first(bi_sphere):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = mo_gradient_field(bi_sphere, grid)
    with pytest.raises(ValueError):
        accumulate_heights(field)


def test_heights_zero_iff_efficient(bi_sphere_field):
    assert np.array_equal(bi_sphere_field.height == 0.0, bi_sphere_field.efficient)


def test_height_one_step_above_efficient_equals_own_norm(bi_sphere_field):
    field = bi_sphere_field
    rx, ry = field.shape
    eff_flat = field.efficient.reshape(-1)
    checked = 0
    for ix in range(rx):
        for iy in range(ry):
            succ = field.successor[ix, iy]
            if field.efficient[ix, iy] or succ < 0 or not eff_flat[succ]:
                continue
            assert field.height[ix, iy] == field.grad_norm[ix, iy]
            checked += 1
    assert checked > 0


def test_heights_strictly_decrease_along_stored_paths(bi_sphere_field):
    field = bi_sphere_field
    rx, ry = field.shape
    flat_height = field.height.reshape(-1)
    for ix in range(rx):
        for iy in range(ry):
            succ = field.successor[ix, iy]
            if succ < 0:
                continue
            assert field.height[ix, iy] > flat_height[succ]


# ------------------------------------------------------------------ dominance


def test_dominance_hand_example():
    field = small_field(f1=[[0.0, 1.0], [1.0, 3.0]], f2=[[5.0, 6.0], [4.0, 3.0]])
    field.efficient = np.ones((2, 2), dtype=bool)
    dominance_counts(field)
    # (1,6) loses to (0,5) and to the equal-f1 pair (1,4); the rest are clean
    assert field.dominance_count.tolist() == [[0, 2], [0, 0]]


def test_dominance_non_efficient_cells_carry_minus_one():
    field = small_field(f1=[[0.0, 1.0], [2.0, 3.0]], f2=[[3.0, 2.0], [1.0, 0.0]])
    field.efficient = np.array([[True, False], [False, True]])
    dominance_counts(field)
    assert field.dominance_count[0, 1] == -1
    assert field.dominance_count[1, 0] == -1
    assert field.dominance_count[0, 0] == 0
    assert field.dominance_count[1, 1] == 0


def test_dominance_single_efficient_cell_is_zero():
    field = small_field(f1=[[9.0, 0.0], [0.0, 0.0]], f2=[[9.0, 0.0], [0.0, 0.0]])
    field.efficient = np.zeros((2, 2), dtype=bool)
    field.efficient[0, 0] = True
    dominance_counts(field)
    assert field.dominance_count[0, 0] == 0


def test_dominance_requires_detection_first(bi_sphere):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = mo_gradient_field(bi_sphere, grid)
    with pytest.raises(ValueError):
        dominance_counts(field)


def brute_force_counts(field):
    cells = np.argwhere(field.efficient)
    objs = [(field.f1[ix, iy], field.f2[ix, iy]) for ix, iy in cells]
    counts = []
    for i, oi in enumerate(objs):
        counts.append(sum(1 for j, oj in enumerate(objs)
                          if j != i and dominates(oj, oi)))
    return cells, counts


def test_dominance_matches_brute_force_on_rastrigin():
    P = make_biobjective(make_problem("rastrigin"), S)
    field = compute_field(P, build_grid(P.box, (30, 30)))
    cells, expected = brute_force_counts(field)
    assert len(expected) > 5
    for (ix, iy), want in zip(cells, expected):
        assert field.dominance_count[ix, iy] == want


@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    f1v=st.lists(st.integers(-4, 4), min_size=16, max_size=16),
    f2v=st.lists(st.integers(-4, 4), min_size=16, max_size=16),
    mask=st.lists(st.booleans(), min_size=16, max_size=16),
)
def test_dominance_matches_brute_force_property(f1v, f2v, mask):
    field = small_field(
        f1=np.array(f1v, dtype=float).reshape(4, 4),
        f2=np.array(f2v, dtype=float).reshape(4, 4),
        res=(4, 4), side=4.0,
    )
    field.efficient = np.array(mask).reshape(4, 4)
    dominance_counts(field)
    cells, expected = brute_force_counts(field)
    for (ix, iy), want in zip(cells, expected):
        assert field.dominance_count[ix, iy] == want
    assert (field.dominance_count[~field.efficient] == -1).all()


def test_reference_efficient_cells_mutually_nondominated(bi_sphere_field):
    counts = bi_sphere_field.dominance_count[bi_sphere_field.efficient]
    assert counts.size > 0
    assert (counts == 0).all()


# ------------------------------------------------------- pipeline/serialization


def test_compute_field_deterministic(bi_sphere):
    grid = build_grid(bi_sphere.box, (40, 40))
    a = compute_field(bi_sphere, grid)
    b = compute_field(bi_sphere, grid)
    for name in ("mo_grad", "grad_norm", "degenerate", "f1", "f2",
                 "efficient", "height", "path_ok", "successor", "dominance_count"):
        assert np.array_equal(getattr(a, name), getattr(b, name)), name


def test_field_csv_roundtrip_and_format(bi_sphere, tmp_path):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = compute_field(bi_sphere, grid)
    out = tmp_path / "field.csv"
    write_field_csv(field, str(out))
    assert not (tmp_path / "field.csv.tmp").exists()

    lines = out.read_text().splitlines()
    assert lines[0] == "ix,iy,x1,x2,f1,f2,mograd_norm,efficient,height,domcount"
    assert len(lines) == 1 + 100

    import csv as csv_mod

    with open(out, newline="") as fh:
        rows = list(csv_mod.DictReader(fh))
    for r, row in enumerate(rows):
        ix, iy = divmod(r, 10)  # row-major cell order
        assert int(row["ix"]) == ix and int(row["iy"]) == iy
        x = grid.cell_center(ix, iy)
        assert float(row["x1"]) == x[0] and float(row["x2"]) == x[1]
        assert float(row["f1"]) == field.f1[ix, iy]
        assert float(row["f2"]) == field.f2[ix, iy]
        assert float(row["mograd_norm"]) == field.grad_norm[ix, iy]
        assert row["efficient"] in ("0", "1")
        assert float(row["height"]) == field.height[ix, iy]
        if row["efficient"] == "1":
            assert int(row["domcount"]) == field.dominance_count[ix, iy]
        else:
            assert row["domcount"] == ""


def test_field_csv_rejects_incomplete_field(bi_sphere, tmp_path):
    grid = build_grid(bi_sphere.box, (10, 10))
    field = mo_gradient_field(bi_sphere, grid)
    with pytest.raises(ValueError):
        write_field_csv(field, str(tmp_path / "x.csv"))
