"""Shared fixtures for the test suite."""
import numpy as np
import pytest

from config.run_config import RunConfig
from optimization.problem import ControlProblem
from solver.conductivity import reference_model
from solver.fracops import FractionalOrder, TimeGrid, build_abc_weights
from solver.mesh import build_grid


@pytest.fixture
def line_grid():
    return build_grid([1.0], [16])


@pytest.fixture
def square_grid():
    return build_grid([1.0, 2.0], [4, 6])


@pytest.fixture
def half_order():
    return FractionalOrder(0.5)


@pytest.fixture
def small_time():
    return TimeGrid(1.0, 32)


@pytest.fixture
def small_weights(half_order, small_time):
    return build_abc_weights(half_order, small_time)


@pytest.fixture
def model():
    return reference_model()


@pytest.fixture
def small_config():
    """Reference problem at a resolution the unit tests can afford."""
    config = RunConfig()
    config.grid.n_cells = [8]
    config.time.n_steps = 24
    config.solver.picard_tol = 1e-12
    return config


@pytest.fixture
def small_problem(small_config):
    return ControlProblem.from_config(small_config)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
