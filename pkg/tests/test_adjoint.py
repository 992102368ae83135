"""Tests for the sensitivity and adjoint solvers."""
import numpy as np
import pytest

from optimization.problem import ControlProblem
from solver.adjoint import duality_sides, duality_test, solve_adjoint, solve_sensitivity, staggered_product
from solver.errors import ShapeError
from solver.fracops import TimeGrid, build_abc_weights
from solver.mesh import BoundaryControl


@pytest.fixture
def solved(small_problem):
    beta = small_problem.constant_control(1.0)
    state = small_problem.solve(beta)
    return small_problem, beta, state


def test_adjoint_vanishes_at_final_time(solved):
    problem, beta, state = solved
    adjoint = problem.adjoint(state, beta)
    assert np.all(adjoint.v[-1] == 0.0)
    assert adjoint.v[0].max() > 0.0


def test_adjoint_without_source_is_zero(solved):
    problem, beta, state = solved
    adjoint = solve_adjoint(state, beta, problem.model, problem.lam, problem.weights,
                            include_cost_source=False)
    assert np.all(adjoint.v == 0.0)


def test_sensitivity_starts_at_zero(solved, rng):
    problem, beta, state = solved
    direction = rng.standard_normal(beta.values.shape)
    sensitivity = solve_sensitivity(state, beta, direction, problem.model, problem.lam, problem.weights)
    assert np.all(sensitivity.psi[0] == 0.0)
    assert np.max(np.abs(sensitivity.psi[1:])) > 0.0


def test_sensitivity_is_linear_in_direction(solved, rng):
    problem, beta, state = solved
    a = rng.standard_normal(beta.values.shape)
    b = rng.standard_normal(beta.values.shape)
    args = (problem.model, problem.lam, problem.weights)
    combined = solve_sensitivity(state, beta, 2.0 * a + b, *args).psi
    separate = 2.0 * solve_sensitivity(state, beta, a, *args).psi + solve_sensitivity(state, beta, b, *args).psi
    np.testing.assert_allclose(combined, separate, rtol=1e-10, atol=1e-13)


def test_duality_between_sensitivity_and_adjoint(solved, rng):
    problem, beta, state = solved
    adjoint = problem.adjoint(state, beta)
    for _ in range(3):
        direction = rng.standard_normal(beta.values.shape)
        sensitivity = solve_sensitivity(state, beta, direction, problem.model, problem.lam, problem.weights)
        lhs, rhs = duality_sides(state, sensitivity, adjoint, direction)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_duality_on_rectangle(small_config):
    small_config.grid.extents = [1.0, 2.0]
    small_config.grid.n_cells = [4, 6]
    problem = ControlProblem.from_config(small_config)
    beta = problem.constant_control(0.8)
    state = problem.solve(beta)
    adjoint = problem.adjoint(state, beta)
    direction = np.linspace(-1.0, 1.0, beta.values.size).reshape(beta.values.shape)
    sensitivity = solve_sensitivity(state, beta, direction, problem.model, problem.lam, problem.weights)
    lhs, rhs = duality_sides(state, sensitivity, adjoint, direction)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_staggered_product_layout(solved):
    problem, beta, state = solved
    adjoint = problem.adjoint(state, beta)
    product = staggered_product(state, adjoint)
    assert product.shape == beta.values.shape
    assert np.all(product[0] == 0.0)
    assert np.all(product[-1] == 2.0 * state.boundary[-1] * adjoint.boundary[-2])


def test_integration_by_parts_with_zero_trajectory(line_grid, small_weights, small_time, rng):
    v = rng.standard_normal((small_time.n_steps + 1, line_grid.n_nodes))
    assert duality_test(np.zeros_like(v), v, small_weights, line_grid) == 0.0


def test_integration_by_parts_improves_with_refinement(line_grid, half_order):
    x = line_grid.coords[:, 0]
    beta = np.array([0.5, 1.5])
    mismatches = []
    for n_steps in (32, 64, 128):
        time = TimeGrid(1.0, n_steps)
        t = time.nodes[:, None]
        u = (1.0 + t ** 2) * np.cos(np.pi * x)[None, :]
        v = (1.0 - t) ** 2 * (1.0 + x)[None, :]
        mismatches.append(duality_test(u, v, build_abc_weights(half_order, time), line_grid, beta))
    assert mismatches[1] < mismatches[0]
    assert mismatches[2] < mismatches[1]


def test_integration_by_parts_shape_check(line_grid, small_weights):
    with pytest.raises(ShapeError):
        duality_test(np.zeros((3, line_grid.n_nodes)), np.zeros((3, line_grid.n_nodes)),
                     small_weights, line_grid)


def test_sensitivity_rejects_wrong_direction_shape(solved):
    problem, beta, state = solved
    with pytest.raises(ShapeError):
        solve_sensitivity(state, beta, np.zeros((2, 2)), problem.model, problem.lam, problem.weights)


def test_control_type_accepted(solved):
    problem, beta, state = solved
    assert isinstance(beta, BoundaryControl)
    raw = problem.adjoint(state, beta.values).v
    np.testing.assert_array_equal(raw, problem.adjoint(state, beta).v)
