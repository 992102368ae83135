"""Tests for closed-form oracles, error metrics and the verification suite."""
import numpy as np
import pytest

from config.run_config import RunConfig
from solver.errors import DomainError, ShapeError
from solver.fracops import AbcWeights, FractionalOrder, TimeGrid, build_abc_weights
from solver.mesh import build_grid
from utils.metrics import ErrorMetrics
from utils.oracles import (
    constant_source_solution,
    eigen_expansion_solution,
    mode_solution,
    neumann_modes,
    relaxation_constants,
    relaxation_solution,
)
from utils.verification import LEVELS, CheckResult, VerificationSuite, relaxation_steps, scaled_config


class TestOracles:
    def test_relaxation_without_decay_is_constant(self, half_order):
        t = np.linspace(0.0, 2.0, 9)
        np.testing.assert_allclose(relaxation_solution(half_order, 0.0, t, u0=2.0), 2.0, rtol=1e-14)

    def test_relaxation_constants(self, half_order):
        c_mu, g_mu = relaxation_constants(half_order, 2.0)
        b = half_order.b_alpha
        assert c_mu == pytest.approx(b / (b + 1.0))
        assert g_mu == pytest.approx(1.0 / (b + 1.0))

    def test_zero_mode_is_constant_source_solution(self, half_order):
        t = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(
            mode_solution(half_order, 0.0, 0.3, 1.5, t),
            constant_source_solution(half_order, 0.3, 1.5, t),
            rtol=1e-13,
        )

    def test_oracles_need_standard_kernel(self):
        with pytest.raises(DomainError):
            relaxation_solution(FractionalOrder(0.5, "two_parameter"), 1.0, [0.5])

    def test_neumann_modes_are_eigenvectors(self, line_grid):
        from solver.mesh import neumann_matrix

        eigenvalues, vectors = neumann_modes(line_grid, 4)
        matrix = neumann_matrix(line_grid)
        for lam, phi in zip(eigenvalues, vectors):
            np.testing.assert_allclose(matrix @ phi, lam * phi, atol=1e-9)
        assert eigenvalues[0] == pytest.approx(0.0, abs=1e-12)

    def test_modes_need_line_grid(self, square_grid):
        with pytest.raises(ShapeError):
            neumann_modes(square_grid, 3)

    def test_single_mode_expansion(self, line_grid, half_order, small_time):
        x = line_grid.coords[:, 0]
        u0 = np.cos(np.pi * x)
        solution = eigen_expansion_solution(line_grid, half_order, small_time, u0, np.zeros_like(x))
        eigenvalues, _ = neumann_modes(line_grid, 2)
        amplitude = mode_solution(half_order, eigenvalues[1], 1.0, 0.0, small_time.nodes)
        np.testing.assert_allclose(solution, np.outer(amplitude, u0), atol=1e-12)


class TestMetrics:
    def test_observed_orders(self):
        rates = ErrorMetrics.observed_orders([1e-2, 2.5e-3, 6.25e-4], [0.1, 0.05, 0.025])
        np.testing.assert_allclose(rates, [2.0, 2.0])

    def test_zero_error_gives_infinite_order(self):
        assert ErrorMetrics.observed_orders([1e-3, 0.0], [0.1, 0.05]) == [float("inf")]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ErrorMetrics.observed_orders([1.0], [0.1, 0.05])

    def test_convergence_table(self):
        df = ErrorMetrics.convergence_table([10, 20], [0.1, 0.05], [1e-2, 5e-3])
        assert list(df.columns) == ["resolution", "step", "error", "order"]
        assert np.isnan(df["order"].iloc[0])
        assert df["order"].iloc[1] == pytest.approx(1.0)

    def test_relative_error(self):
        assert ErrorMetrics.relative_error([1.1, 2.0], [1.0, 2.0]) == pytest.approx(0.1)


def test_relaxation_stepper_converges_at_final_time(half_order):
    errors = []
    for n_steps in (64, 128, 256):
        grid = TimeGrid(1.0, n_steps)
        numeric = relaxation_steps(build_abc_weights(half_order, grid), mu=1.0)
        errors.append(abs(numeric[-1] - float(relaxation_solution(half_order, 1.0, [1.0])[0])))
    assert errors[1] < errors[0]
    assert errors[2] < errors[1]
    assert errors[2] < 1e-2


def test_scaled_config_is_a_copy():
    config = RunConfig()
    config.classical = True
    scaled = scaled_config(config, 8, 16, picard_tol=1e-12)
    assert scaled.grid.n_cells == [8] and scaled.time.n_steps == 16
    assert not scaled.classical
    assert config.grid.n_cells == [32] and config.classical


def test_check_result_dict():
    result = CheckResult("demo", True, 1e-3, 1e-2, details={"n": 4}, runtime=0.12345)
    assert result.to_dict()["runtime_s"] == 0.123
    assert result.to_dict()["comparison"] == "max"


def test_unknown_level():
    with pytest.raises(ValueError):
        VerificationSuite(RunConfig(), "exhaustive")
    assert set(LEVELS) == {"quick", "full"}


def test_special_function_checks_pass():
    results = VerificationSuite(RunConfig(), "quick").check_mlf()
    assert [r.name for r in results] == ["mlf_exp", "mlf_cos", "mlf_at_zero"]
    assert all(r.passed for r in results), [r.to_dict() for r in results]


def test_eigen_check_measures_every_time_node(monkeypatch):
    class Solved:
        def __init__(self, u):
            self.u = u

    def fake_state(space, grid, *args, **kwargs):
        return Solved(np.zeros((grid.n_steps + 1, space.n_nodes)))

    def fake_exact(space, order, grid, *args, **kwargs):
        exact = np.zeros((grid.n_steps + 1, space.n_nodes))
        exact[1] = 1.0
        return exact

    monkeypatch.setattr("utils.verification.solve_state", fake_state)
    monkeypatch.setattr("utils.verification.eigen_expansion_solution", fake_exact)
    [result] = VerificationSuite(RunConfig(), "quick").check_eigen_expansion()
    assert result.measured == pytest.approx(1.0)
    assert not result.passed


def test_operator_check_builds_one_table_per_order(monkeypatch):
    calls = []
    original = AbcWeights.table

    def counting_table(self):
        calls.append(self.order.alpha)
        return original(self)

    monkeypatch.setattr(AbcWeights, "table", counting_table)
    results = VerificationSuite(RunConfig(), "quick").check_operators()
    assert calls == [0.3, 0.5, 0.7, 0.9]
    assert results[0].name == "abc_constants" and results[0].passed


@pytest.mark.slow
@pytest.mark.parametrize("check", [
    "check_operators",
    "check_classical_limit",
    "check_relaxation",
    "check_eigen_expansion",
    "check_weak_residual",
    "check_duality",
    "check_gradient",
    "check_optimizer",
])
def test_quick_suite_checks_pass(check):
    suite = VerificationSuite(RunConfig(), "quick")
    results = getattr(suite, check)()
    assert all(r.passed for r in results), [r.to_dict() for r in results]
