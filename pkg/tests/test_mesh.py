"""Tests for grids, the Robin Laplacian and boundary controls."""
import numpy as np
import pytest

from solver.errors import ConfigError, ShapeError
from solver.mesh import (
    BoundaryControl,
    apply_laplacian_robin,
    build_grid,
    inner,
    integrate_boundary,
    integrate_domain,
    neumann_matrix,
)


def test_line_grid_classification(line_grid):
    assert line_grid.n_nodes == 17
    assert list(line_grid.boundary_nodes) == [0, 16]
    assert line_grid.interior_nodes.size == 15
    np.testing.assert_array_equal(line_grid.normals, [[-1.0], [1.0]])
    assert line_grid.perimeter == 2.0


def test_square_grid_classification(square_grid):
    nx, ny = square_grid.n_cells
    assert square_grid.n_nodes == (nx + 1) * (ny + 1)
    assert square_grid.n_boundary == 2 * (nx + ny)
    assert square_grid.interior_nodes.size == (nx - 1) * (ny - 1)
    np.testing.assert_allclose(np.linalg.norm(square_grid.normals, axis=1), 1.0)
    corner = list(square_grid.boundary_nodes).index(0)
    np.testing.assert_allclose(square_grid.normals[corner], [-np.sqrt(0.5), -np.sqrt(0.5)])


def test_quadrature_measures(square_grid):
    assert integrate_domain(square_grid, np.ones(square_grid.n_nodes)) == pytest.approx(2.0)
    assert integrate_boundary(square_grid, np.ones(square_grid.n_nodes)) == pytest.approx(6.0)
    assert square_grid.perimeter == pytest.approx(6.0)


def test_quadrature_of_linear_field_is_exact(square_grid):
    x, y = square_grid.coords[:, 0], square_grid.coords[:, 1]
    assert integrate_domain(square_grid, x + 3.0 * y) == pytest.approx(1.0 + 6.0)


@pytest.mark.parametrize("extents,n_cells", [([1.0], [3]), ([0.0], [8]), ([1.0, 1.0], [8]), ([1.0] * 3, [4] * 3)])
def test_invalid_grids(extents, n_cells):
    with pytest.raises(ConfigError):
        build_grid(extents, n_cells)


def test_neumann_operator_kills_constants(square_grid):
    ones = np.ones(square_grid.n_nodes)
    np.testing.assert_allclose(neumann_matrix(square_grid) @ ones, 0.0, atol=1e-10)


def test_robin_operator_is_self_adjoint(square_grid, rng):
    u = rng.standard_normal(square_grid.n_nodes)
    v = rng.standard_normal(square_grid.n_nodes)
    beta = rng.uniform(0.5, 2.0, square_grid.n_boundary)
    left = inner(square_grid, u, apply_laplacian_robin(square_grid, v, beta))
    right = inner(square_grid, apply_laplacian_robin(square_grid, u, beta), v)
    assert left == pytest.approx(right, rel=1e-12)


def test_robin_operator_on_constants_gives_boundary_flux(square_grid):
    ones = np.ones(square_grid.n_nodes)
    beta = np.full(square_grid.n_boundary, 0.75)
    flux = inner(square_grid, ones, apply_laplacian_robin(square_grid, ones, beta))
    assert flux == pytest.approx(0.75 * square_grid.perimeter, rel=1e-12)


def test_robin_operator_is_positive_definite(line_grid, rng):
    beta = np.full(line_grid.n_boundary, 0.1)
    for _ in range(5):
        u = rng.standard_normal(line_grid.n_nodes)
        assert inner(line_grid, u, apply_laplacian_robin(line_grid, u, beta)) > 0.0


def test_robin_condition_matches_ghost_node(line_grid):
    h = line_grid.spacing[0]
    u = np.cos(line_grid.coords[:, 0])
    beta = np.array([0.3, 0.7])
    out = apply_laplacian_robin(line_grid, u, beta)
    ghost = u[1] - 2.0 * h * beta[0] * u[0]
    assert out[0] == pytest.approx((2.0 * u[0] - u[1] - ghost) / h ** 2, rel=1e-12)


def test_neumann_laplacian_of_cosine_is_second_order():
    errors = []
    for n_cells in (16, 32, 64):
        grid = build_grid([1.0], [n_cells])
        x = grid.coords[:, 0]
        out = apply_laplacian_robin(grid, np.cos(np.pi * x), np.zeros(grid.n_boundary))
        errors.append(np.max(np.abs(out - np.pi ** 2 * np.cos(np.pi * x))))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    np.testing.assert_allclose(ratios, 4.0, rtol=0.05)
    assert np.all(np.log2(ratios) >= 1.9)


def test_shape_errors(line_grid):
    with pytest.raises(ShapeError):
        apply_laplacian_robin(line_grid, np.zeros(line_grid.n_nodes), np.zeros(3))
    with pytest.raises(ShapeError):
        integrate_domain(line_grid, np.zeros(4))


def test_boundary_trace_of_trajectory(square_grid):
    trajectory = np.arange(3 * square_grid.n_nodes, dtype=float).reshape(3, -1)
    trace = square_grid.boundary_trace(trajectory)
    assert trace.shape == (3, square_grid.n_boundary)
    np.testing.assert_array_equal(trace[1], trajectory[1, square_grid.boundary_nodes])


class TestBoundaryControl:
    def test_constant(self, line_grid):
        control = BoundaryControl.constant(line_grid, 5, 1.0, 0.5, 2.0)
        assert control.values.shape == (5, 2)
        assert control.n_times == 5
        assert control.active_fraction() == 0.0

    def test_projection_is_idempotent(self, rng):
        raw = rng.normal(1.0, 2.0, (6, 4))
        once = BoundaryControl.projected(raw, 0.5, 2.0)
        twice = BoundaryControl.projected(once.values, 0.5, 2.0)
        np.testing.assert_array_equal(once.values, twice.values)
        assert once.values.min() >= 0.5 and once.values.max() <= 2.0

    def test_active_mask(self):
        control = BoundaryControl(np.array([[0.5, 1.0], [2.0, 1.5]]), 0.5, 2.0)
        np.testing.assert_array_equal(control.active_mask(), [[True, False], [True, False]])
        assert control.active_fraction() == pytest.approx(0.5)

    @pytest.mark.parametrize("lower,upper", [(0.0, 1.0), (-1.0, 1.0), (2.0, 1.0)])
    def test_rejects_bad_box(self, lower, upper):
        with pytest.raises(ConfigError):
            BoundaryControl(np.ones((2, 2)), lower, upper)

    def test_rejects_values_outside_box(self):
        with pytest.raises(ConfigError):
            BoundaryControl(np.full((2, 2), 3.0), 0.5, 2.0)

    def test_rejects_nonfinite_values(self):
        with pytest.raises(ShapeError):
            BoundaryControl(np.array([[1.0, np.nan]]), 0.5, 2.0)

    def test_check_grid(self, line_grid):
        control = BoundaryControl.constant(line_grid, 5, 1.0, 0.5, 2.0)
        control.check_grid(line_grid, 5)
        with pytest.raises(ShapeError):
            control.check_grid(line_grid, 6)
