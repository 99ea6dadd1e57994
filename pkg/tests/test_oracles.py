import numpy as np
import pytest

from onebitcs.dual import objective, solve_l0, solve_mcp, solve_sorted_l1
from onebitcs.oracles import dual_bisection, l0_support_enumeration, mcp_naive, sphere_grid_search
from onebitcs.penalties import Penalty, evaluate


def test_bisection_examples():
    assert dual_bisection(Penalty.l0(1), np.array([0.5])).mu == pytest.approx(0.125, abs=1e-9)
    assert dual_bisection(Penalty.l1(0.1), np.array([0.4, -0.3, 0])).mu == pytest.approx(np.sqrt(0.13), abs=1e-8)
    assert dual_bisection(Penalty.mcp(0.1, 3), np.array([0.05, 0.5])).mu == pytest.approx(0.5, abs=1e-8)


def test_bisection_starts_at_zero_when_ball_is_slack():
    s = dual_bisection(Penalty.l1(1.0), np.array([0.5, -0.2]))
    assert s.mu == 0 and not np.any(s.x)


def test_enumeration_examples():
    x, F = l0_support_enumeration(np.array([0, 0.6, 0.8]), 0.01)
    np.testing.assert_allclose(x, [0, 0.6, 0.8])
    assert F == pytest.approx(-0.98, abs=1e-15)
    x, F = l0_support_enumeration(np.array([0.3, 2.0]), 0.5)
    np.testing.assert_allclose(x, [0, 1])
    assert F == pytest.approx(-1.5, abs=1e-15)
    x, F = l0_support_enumeration(np.array([0.3, -0.2]), 0.5)
    assert not np.any(x) and F == 0


def test_enumeration_value_is_exact_for_its_output():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.standard_normal(rng.integers(1, 9))
        lam = 10 ** rng.uniform(-3, 0)
        x, F = l0_support_enumeration(v, lam)
        assert F == evaluate(Penalty.l0(lam), x) - float(np.dot(v, x))


def test_grid_search_examples():
    v = np.array([0.05, 0.5])
    pen = Penalty.mcp(0.1, 3)
    assert objective(pen, v, sphere_grid_search(pen, v)) == pytest.approx(-0.485, abs=1e-3)
    np.testing.assert_allclose(sphere_grid_search(Penalty.l1(1), np.array([2.0, 0])), [1, 0], atol=1e-3)
    pen = Penalty.sorted_l1(0.2, [1, 0.5])
    v = np.array([0.3, 0.4])
    fast = solve_sorted_l1(v, 0.2, [1, 0.5])
    assert objective(pen, v, sphere_grid_search(pen, v)) == pytest.approx(objective(pen, v, fast.x), abs=1e-3)


def test_grid_search_dimension_limit():
    with pytest.raises(ValueError):
        sphere_grid_search(Penalty.l1(0.1), np.ones(4))


def test_naive_matches_fast_on_examples():
    for v, lam, b in [((0.05, 0.5), 0.1, 3), ((0.05, 0.05), 0.1, 3), ((0.4, -0.3), 0.1, 1e6),
                      ((0.2, -0.1, 0.05), 0.9, 3)]:
        v = np.array(v)
        a, c = solve_mcp(v, lam, b), mcp_naive(v, lam, b)
        assert c.mu == pytest.approx(a.mu, abs=1e-8)
        np.testing.assert_allclose(c.x, a.x, atol=1e-8)


def test_naive_solves_many_roots_on_dense_input():
    v = np.random.default_rng(1).standard_normal(200)
    assert mcp_naive(v, 0.1, 3).root_solves > 10
    assert solve_mcp(v, 0.1, 3).root_solves == 1


def test_oracles_are_deterministic():
    v = np.random.default_rng(2).standard_normal(5)
    pen = Penalty.mcp(0.2, 1.5)
    a, b = dual_bisection(pen, v), dual_bisection(pen, v)
    assert a.mu == b.mu and np.array_equal(a.x, b.x)


def test_l0_fast_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(300):
        v = rng.standard_normal(rng.integers(1, 9)) * 10 ** rng.uniform(-1.5, 0.5)
        lam = 10 ** rng.uniform(-3, 0)
        _, F = l0_support_enumeration(v, lam)
        assert objective(Penalty.l0(lam), v, solve_l0(v, lam).x) == pytest.approx(F, abs=1e-10)
