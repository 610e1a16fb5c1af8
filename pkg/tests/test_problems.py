import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from somogsa.problems import (
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


def test_box_basics():
    box = default_box(2)
    assert box.dim == 2
    assert box.contains(np.array([0.0, 5.0]))
    assert not box.contains(np.array([0.0, 5.1]))
    assert np.array_equal(box.clamp(np.array([-7.0, 3.0])), np.array([-5.0, 3.0]))


def test_box_rejects_bad_bounds():
    with pytest.raises(ValueError):
        Box(np.array([0.0, 0.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        Box(np.array([0.0, 2.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        Box(np.array([0.0, np.inf]), np.array([1.0, np.inf]))


def test_sphere_values():
    assert eval_sphere(np.zeros(2), np.zeros(2)) == 0.0
    assert eval_sphere(np.array([1.0, 1.0]), np.zeros(2)) == 2.0
    s = np.array([-3.5, -2.5])
    assert eval_sphere(s, s) == 0.0


def test_sphere_gradient():
    assert np.array_equal(grad_sphere(np.array([1.0, 0.0]), np.zeros(2)), np.array([2.0, 0.0]))
    s = np.array([0.7, -1.2])
    assert np.array_equal(grad_sphere(s, s), np.zeros(2))
    g = grad_sphere(np.array([-1.5, -0.5]), np.array([-3.5, -2.5]))
    assert np.array_equal(g, np.array([4.0, 4.0]))


def test_sphere_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_sphere(np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        grad_sphere(np.zeros(2), np.zeros(3))


@settings(derandomize=True, max_examples=50)
@given(
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.lists(st.floats(-4, 4), min_size=2, max_size=2),
)
def test_sphere_strictly_convex_on_segments(a, b, s):
    a, b, s = np.array(a), np.array(b), np.array(s)
    if np.linalg.norm(a - b) < 1e-3:
        return
    mid = 0.5 * (a + b)
    assert eval_sphere(mid, s) < 0.5 * (eval_sphere(a, s) + eval_sphere(b, s))


def test_rastrigin_values():
    assert eval_rastrigin(np.zeros(2)) == 0.0
    assert eval_rastrigin(np.array([1.0, 1.0])) == pytest.approx(2.0, abs=1e-12)
    assert eval_rastrigin(np.array([0.5, 0.5])) == pytest.approx(40.5, abs=1e-12)


def test_rastrigin_nonnegative():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.uniform(-5, 5, size=2)
        assert eval_rastrigin(x) > 0.0


def test_rastrigin_gradient():
    assert np.array_equal(grad_rastrigin(np.zeros(2)), np.zeros(2))
    g = grad_rastrigin(np.array([0.5, 0.0]))
    assert g == pytest.approx([1.0, 0.0], abs=1e-12)
    g = grad_rastrigin(np.array([0.25, 0.0]))
    assert g[0] == pytest.approx(0.5 + 20.0 * np.pi, rel=1e-12)


def test_gallagher_build_is_deterministic():
    box = default_box(2)
    p1 = build_gallagher(21, 7, box)
    p2 = build_gallagher(21, 7, box)
    assert p1.value(np.array([0.3, -1.1])) == p2.value(np.array([0.3, -1.1]))
    assert np.array_equal(p1.known_optimum[0], p2.known_optimum[0])


def test_gallagher_best_peak_dominates():
    p = build_gallagher(21, 7, default_box(2))
    xopt, fopt = p.known_optimum
    assert fopt == 0.0
    assert p.value(xopt) == pytest.approx(0.0, abs=1e-12)
    # frozen from the seeded generator; guards the RNG stream contract
    assert xopt == pytest.approx([1.2509546660466695, 3.9721380096957546], abs=1e-12)


def test_gallagher_grid_scan_confirms_optimum():
    # independent check: no grid point beats the recorded best peak center
    p = build_gallagher(21, 7, default_box(2))
    xs = np.linspace(-5, 5, 200)
    best = min(p.value(np.array([a, b])) for a in xs for b in xs)
    assert best >= 0.0
    assert p.value(p.known_optimum[0]) <= best


def test_gallagher_zero_peaks_rejected():
    with pytest.raises(ValueError):
        build_gallagher(0, 1, default_box(2))


def test_gallagher_far_from_all_peaks():
    spec = GallagherSpec(1, 0, np.array([[0.0, 0.0]]), np.array([6.0]), np.array([1.0]))
    assert eval_gallagher(spec, np.array([60.0, 0.0])) == 6.0


def test_gallagher_single_peak_formula():
    spec = GallagherSpec(1, 0, np.array([[1.0, 2.0]]), np.array([4.0]), np.array([1.5]))
    v = eval_gallagher(spec, np.array([2.5, 2.0]))
    assert v == pytest.approx(4.0 * (1.0 - np.exp(-0.5)), rel=1e-14)


def test_gallagher_single_peak_descent_reaches_center():
    p = build_gallagher(1, 42, default_box(2))
    center = p.known_optimum[0]
    for start in [np.array([4.5, -4.5]), np.array([-5.0, 5.0]), np.array([0.0, 0.0])]:
        # far from the peak the raw gradient underflows, so walk with
        # normalized steps first, then polish with plain gradient steps
        x = start.copy()
        for _ in range(400):
            g = p.gradient(x)
            if np.linalg.norm(x - center) < 0.05:
                break
            x = p.box.clamp(x - 0.05 * g / np.linalg.norm(g))
        for _ in range(2000):
            x = p.box.clamp(x - 0.05 * p.gradient(x))
        assert np.linalg.norm(x - center) < 1e-3


def test_gallagher_gradient_tie_breaks_low_index():
    spec = GallagherSpec(
        2, 0,
        np.array([[-1.0, 0.0], [1.0, 0.0]]),
        np.array([5.0, 5.0]),
        np.array([1.0, 1.0]),
    )
    g = grad_gallagher(spec, np.zeros(2))
    expected = 5.0 * np.exp(-0.5) * np.array([1.0, 0.0])
    assert g == pytest.approx(expected, rel=1e-14)


def _counted(problem):
    calls = {"n": 0}

    def value(x):
        calls["n"] += 1
        return problem.value(x)

    counted = ScalarProblem(problem.name, problem.dim, problem.box, value)
    return counted, calls


def test_finite_diff_interior_cost_and_accuracy():
    sphere = make_problem("sphere")
    counted, calls = _counted(sphere)
    g = finite_diff_grad(counted, np.array([1.0, 0.0]), h=1e-6)
    assert calls["n"] == 4
    assert g == pytest.approx([2.0, 0.0], abs=1e-6)


def test_finite_diff_one_sided_at_face():
    sphere = make_problem("sphere")
    g, mask = finite_diff_grad(sphere, np.array([5.0, 0.0]), return_mask=True)
    assert mask.tolist() == [True, False]
    assert g[0] == pytest.approx(10.0, abs=1e-4)
    assert g[1] == pytest.approx(0.0, abs=1e-6)


def test_finite_diff_constant_function():
    box = default_box(2)
    flat = ScalarProblem("flat", 2, box, lambda x: 3.25)
    g = finite_diff_grad(flat, np.array([0.4, -0.7]))
    assert np.array_equal(g, np.zeros(2))


def test_rastrigin_fd_matches_example():
    p = make_problem("rastrigin")
    g = finite_diff_grad(p, np.array([0.5, 0.0]), h=1e-6)
    assert g == pytest.approx([1.0, 0.0], abs=1e-4)


@pytest.mark.parametrize(
    "pid", ["sphere", "rastrigin", "gallagher21:1", "gallagher21:7", "gallagher101:3"]
)
def test_analytic_gradient_matches_finite_differences(pid):
    p = make_problem(pid)
    rng = np.random.default_rng(1234)
    for _ in range(100):
        x = rng.uniform(p.box.lower + 1e-3, p.box.upper - 1e-3)
        err = relative_gradient_error(p.gradient(x), finite_diff_grad(p, x))
        assert err <= 1e-5


def test_make_problem_registry():
    assert make_problem("sphere").name == "sphere"
    assert make_problem("rastrigin").gradient_kind == "analytic"
    p_default = make_problem("gallagher21")
    p_seed1 = make_problem("gallagher21:1")
    assert np.array_equal(p_default.known_optimum[0], p_seed1.known_optimum[0])
    with pytest.raises(ValueError):
        make_problem("rosenbrock")
    with pytest.raises(ValueError):
        make_problem("gallagherXY:3")
    with pytest.raises(ValueError):
        make_problem("gallagher21:seed")
