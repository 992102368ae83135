"""Tests for the forward thermistor solver."""
import numpy as np
import pytest

from solver.conductivity import constant_model
from solver.errors import ShapeError, SolverError
from solver.fracops import FractionalOrder, TimeGrid, build_abc_weights, build_backward_euler_weights
from solver.mesh import BoundaryControl, build_grid, integrate_domain
from solver.state import nonlocal_source, solve_state, source_bounds, weak_form_residual
from utils.oracles import constant_source_solution


def _zeros_control(grid, time):
    return np.zeros((time.n_steps + 1, grid.n_boundary))


def test_insulated_sourceless_state_stays_constant(line_grid, small_time, small_weights, model):
    u0 = np.full(line_grid.n_nodes, 0.7)
    state = solve_state(line_grid, small_time, small_weights, _zeros_control(line_grid, small_time),
                        u0, model, lam=0.0)
    np.testing.assert_allclose(state.u, 0.7, rtol=0, atol=1e-12)


def test_robin_loss_cools_the_rod(line_grid, small_time, small_weights, model):
    u0 = np.ones(line_grid.n_nodes)
    beta = BoundaryControl.constant(line_grid, small_time.n_steps + 1, 1.0, 0.1, 2.0)
    state = solve_state(line_grid, small_time, small_weights, beta, u0, model, lam=0.0)
    assert integrate_domain(line_grid, state.u[-1]) < integrate_domain(line_grid, u0)
    assert state.u.min() > 0.0


@pytest.mark.parametrize("n_steps", [32, 64, 128])
def test_uniform_source_keeps_state_uniform(n_steps):
    grid = build_grid([1.0], [4])
    order = FractionalOrder(0.5)
    time = TimeGrid(1.0, n_steps)
    weights = build_abc_weights(order, time)
    source = np.full(grid.n_nodes, 1.0)
    state = solve_state(grid, time, weights, _zeros_control(grid, time), np.zeros(grid.n_nodes),
                        constant_model(), lam=0.0, source=source)
    # a spatially uniform source keeps the state uniform
    np.testing.assert_allclose(state.u, np.broadcast_to(state.u[:, :1], state.u.shape), atol=1e-12)
    assert weak_form_residual(state, weights, _zeros_control(grid, time), constant_model(),
                              source=source) <= 1e-9


def test_constant_source_converges_at_final_time():
    grid = build_grid([1.0], [4])
    order = FractionalOrder(0.5)
    errors = []
    for n_steps in (32, 64, 128):
        time = TimeGrid(1.0, n_steps)
        weights = build_abc_weights(order, time)
        state = solve_state(grid, time, weights, _zeros_control(grid, time), np.zeros(grid.n_nodes),
                            constant_model(), lam=0.0, source=np.ones(grid.n_nodes))
        exact = constant_source_solution(order, 0.0, 1.0, time.t_final)
        errors.append(abs(state.u[-1, 0] - float(exact)) / float(exact))
    assert errors[1] < errors[0]
    assert errors[2] < errors[1]
    assert errors[2] < 5e-2


def test_nonlocal_source_of_constant_conductivity(line_grid):
    g = nonlocal_source(line_grid, np.zeros(line_grid.n_nodes), constant_model(2.0), lam=1.0)
    np.testing.assert_allclose(g, 0.5, rtol=1e-14)


def test_nonlocal_source_respects_bounds(line_grid, model, rng):
    lower, upper = source_bounds(line_grid, model, lam=1.5)
    for _ in range(5):
        g = nonlocal_source(line_grid, rng.normal(0.0, 3.0, line_grid.n_nodes), model, lam=1.5)
        assert g.min() >= lower * (1 - 1e-12)
        assert g.max() <= upper * (1 + 1e-12)


def test_reference_state_satisfies_weak_form(line_grid, small_time, small_weights, model):
    beta = BoundaryControl.constant(line_grid, small_time.n_steps + 1, 0.5, 0.1, 2.0)
    u0 = np.cos(np.pi * line_grid.coords[:, 0])
    state = solve_state(line_grid, small_time, small_weights, beta, u0, model, lam=1.0, tol=1e-12)
    assert weak_form_residual(state, small_weights, beta, model) <= 1e-8
    assert len(state.picard_iterations) == small_time.n_steps
    assert max(state.contraction) < 1.0
    assert state.energy["mu1"] > 0.0


def test_state_on_rectangle(square_grid, small_time, small_weights, model):
    beta = BoundaryControl.constant(square_grid, small_time.n_steps + 1, 1.0, 0.1, 2.0)
    state = solve_state(square_grid, small_time, small_weights, beta,
                        np.zeros(square_grid.n_nodes), model, lam=1.0, tol=1e-12)
    assert np.all(np.isfinite(state.u))
    assert state.u[-1].min() > 0.0
    assert weak_form_residual(state, small_weights, beta, model) <= 1e-8


def test_classical_weights_run(line_grid, small_time, model):
    weights = build_backward_euler_weights(small_time)
    beta = BoundaryControl.constant(line_grid, small_time.n_steps + 1, 1.0, 0.1, 2.0)
    state = solve_state(line_grid, small_time, weights, beta, np.zeros(line_grid.n_nodes), model, lam=1.0)
    assert np.all(np.isfinite(state.u))


def test_picard_budget_exhausted(line_grid, small_time, small_weights, model):
    beta = BoundaryControl.constant(line_grid, small_time.n_steps + 1, 1.0, 0.1, 2.0)
    with pytest.raises(SolverError) as info:
        solve_state(line_grid, small_time, small_weights, beta, np.zeros(line_grid.n_nodes),
                    model, lam=1.0, max_picard=1)
    assert len(info.value.residual_history) == 1


def test_control_shape_checked(line_grid, small_time, small_weights, model):
    with pytest.raises(ShapeError):
        solve_state(line_grid, small_time, small_weights, np.ones((3, 2)),
                    np.zeros(line_grid.n_nodes), model, lam=1.0)


def test_weights_for_other_grid_rejected(line_grid, small_weights, model):
    time = TimeGrid(1.0, 16)
    with pytest.raises(ShapeError):
        solve_state(line_grid, time, small_weights, _zeros_control(line_grid, time),
                    np.zeros(line_grid.n_nodes), model, lam=1.0)
