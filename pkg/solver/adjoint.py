"""Sensitivity and adjoint solvers, plus the discrete ABC duality identity.

Both solvers resolve the rank-one nonlocal coupling exactly with a
bordered (Sherman-Morrison) solve. The adjoint runs forward in reversed
time and is stored on the original grid with v(T) = 0; the reversed step
that produces ``v[j]`` uses the state coefficients of node ``j + 1``, which
makes the control gradient the exact derivative of the discrete cost.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from solver.conductivity import ConductivityModel
from solver.errors import NumericsError, ShapeError
from solver.fracops import AbcWeights, TimeGrid, apply_abc_left, apply_abc_right, kernel_array
from solver.mesh import SpaceGrid, laplacian_robin_matrix
from solver.state import ControlLike, StateTrajectory, StepOperator, control_values

logger = logging.getLogger(__name__)

BORDER_TOL = 1e-12


@dataclass(eq=False)
class SensitivityTrajectory:
    """Directional derivative psi of the control-to-state map, ``psi[n, i]``."""
    grid: SpaceGrid
    time: TimeGrid
    psi: np.ndarray

    @property
    def boundary(self) -> np.ndarray:
        return self.psi[:, self.grid.boundary_nodes]


@dataclass(eq=False)
class AdjointTrajectory:
    """Adjoint state v, ``v[n, i]``, with ``v[-1] == 0``."""
    grid: SpaceGrid
    time: TimeGrid
    v: np.ndarray

    @property
    def boundary(self) -> np.ndarray:
        return self.v[:, self.grid.boundary_nodes]


def _bordered_solve(lu, rhs: np.ndarray, border: np.ndarray, functional: np.ndarray) -> np.ndarray:
    # solves (M + border functional^T) x = rhs given the factors of M
    y = lu.solve(rhs)
    z = lu.solve(border)
    denominator = 1.0 + functional @ z
    if abs(denominator) < BORDER_TOL:
        raise NumericsError(
            f"bordered system is singular (1 + c.M^-1 b = {denominator:.3e})"
        )
    return y - (functional @ y / denominator) * z


def _linearization(state: StateTrajectory, model: ConductivityModel, n: int):
    u_n = state.u[n]
    f = np.asarray(model.eval(u_n), dtype=float)
    fp = np.asarray(model.deriv(u_n), dtype=float)
    total = float(state.grid.domain_weights @ f)
    return f, fp, total


def solve_sensitivity(state: StateTrajectory, beta: ControlLike, direction,
                      model: ConductivityModel, lam: float,
                      weights: AbcWeights) -> SensitivityTrajectory:
    """Sensitivity psi of the state in the control direction l.

    Args:
        state: Solved state trajectory for beta
        beta: Control the state was solved with
        direction: Control direction l, shape (n_steps + 1, n_boundary)
        model: Conductivity model
        lam: Dimensionless parameter lambda
        weights: ABC weights used for the state

    Returns:
        SensitivityTrajectory with psi(0) = 0
    """
    grid, time = state.grid, state.time
    beta_values = control_values(beta, grid, time)
    direction = control_values(direction, grid, time)
    w = grid.domain_weights
    nodes = grid.boundary_nodes

    psi = np.zeros_like(state.u)
    increments = np.zeros((time.n_steps, grid.n_nodes))
    operator = StepOperator(grid, weights.leading)
    for n in range(1, time.n_steps + 1):
        f, fp, total = _linearization(state, model, n)
        lu = operator.factor(beta_values[n], shift=-lam * fp / total ** 2)
        rhs = weights.leading * psi[n - 1] - weights.history(n, increments)
        rhs[nodes] -= direction[n] * state.u[n, nodes] * grid.boundary_weights / w[nodes]
        psi[n] = _bordered_solve(lu, rhs, 2.0 * lam * f / total ** 3, w * fp)
        increments[n - 1] = psi[n] - psi[n - 1]
    return SensitivityTrajectory(grid=grid, time=time, psi=psi)


def solve_adjoint(state: StateTrajectory, beta: ControlLike, model: ConductivityModel,
                  lam: float, weights: AbcWeights,
                  include_cost_source: bool = True) -> AdjointTrajectory:
    """Backward adjoint system solved forward in reversed time.

    The right-hand side carries the cost source 1 (weighted by the time
    trapezoid) unless ``include_cost_source`` is False.
    """
    grid, time = state.grid, state.time
    beta_values = control_values(beta, grid, time)
    w = grid.domain_weights
    n_steps = time.n_steps
    source_scale = time.trapezoid_weights / time.dt if include_cost_source else np.zeros(n_steps + 1)

    reversed_v = np.zeros_like(state.u)
    increments = np.zeros((n_steps, grid.n_nodes))
    operator = StepOperator(grid, weights.leading)
    for k in range(1, n_steps + 1):
        j = n_steps + 1 - k
        f, fp, total = _linearization(state, model, j)
        lu = operator.factor(beta_values[j], shift=-lam * fp / total ** 2)
        rhs = weights.leading * reversed_v[k - 1] - weights.history(k, increments)
        rhs += source_scale[j]
        reversed_v[k] = _bordered_solve(lu, rhs, 2.0 * lam * fp / total ** 3, w * f)
        increments[k - 1] = reversed_v[k] - reversed_v[k - 1]
    v = reversed_v[::-1].copy()
    logger.debug("adjoint solved: max |v| = %.4g", float(np.max(np.abs(v))))
    return AdjointTrajectory(grid=grid, time=time, v=v)


def staggered_product(state: StateTrajectory, adjoint: AdjointTrajectory) -> np.ndarray:
    """Boundary product (dt / tau_j) u_j v_{j-1} paired the way the discrete
    cost differentiates; zero at j = 0."""
    time = state.time
    product = np.zeros((time.n_steps + 1, state.grid.n_boundary))
    scale = time.dt / time.trapezoid_weights
    product[1:] = scale[1:, None] * state.boundary[1:] * adjoint.boundary[:-1]
    return product


def duality_sides(state: StateTrajectory, sensitivity: SensitivityTrajectory,
                  adjoint: AdjointTrajectory, direction) -> tuple:
    """Both sides of int_Q psi = -int_S l u v, computed independently."""
    grid, time = state.grid, state.time
    direction = control_values(direction, grid, time)
    tau = time.trapezoid_weights
    lhs = float(tau @ (sensitivity.psi @ grid.domain_weights))
    product = staggered_product(state, adjoint)
    rhs = -float(tau @ ((direction * product) @ grid.boundary_weights))
    return lhs, rhs


def duality_test(u: np.ndarray, v: np.ndarray, weights: AbcWeights, grid: SpaceGrid,
                 beta_slice: Optional[np.ndarray] = None) -> float:
    """Mismatch of the ABC integration-by-parts identity for two trajectories.

    Compares int_Q (D_0 u - Lap u) v with
    int_Q u (D_T v - Lap v) + B/(1-a) int v(T) int u K(T-t) dt
    - B/(1-a) int u(0) int K(t) v dt, where D_T is the right derivative
    and K the memory kernel. Both Laplacians carry the same Robin data.
    """
    time = weights.grid
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    expected = (time.n_steps + 1, grid.n_nodes)
    if u.shape != expected or v.shape != expected:
        raise ShapeError(f"trajectories must have shape {expected}, got {u.shape} and {v.shape}")
    if beta_slice is None:
        beta_slice = np.zeros(grid.n_boundary)
    operator = laplacian_robin_matrix(grid, beta_slice)
    w = grid.domain_weights
    tau = time.trapezoid_weights

    left = apply_abc_left(weights, u) + (operator @ u.T).T
    right = apply_abc_right(weights, v) + (operator @ v.T).T
    lhs = float(tau @ np.sum(left * v * w, axis=1))
    core = float(tau @ np.sum(u * right * w, axis=1))

    if weights.classical:
        boundary_in_time = float(w @ (v[-1] * u[-1] - u[0] * v[0]))
    else:
        kernel = kernel_array(weights.order, time.nodes)
        prefactor = weights.order.prefactor
        final = (tau * kernel[::-1]) @ u
        initial = (tau * kernel) @ v
        boundary_in_time = prefactor * float(w @ (v[-1] * final - u[0] * initial))
    return abs(lhs - (core + boundary_in_time))
