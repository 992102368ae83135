"""Forward solver for the nonlocal ABC-fractional thermistor problem."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from solver.conductivity import ConductivityModel
from solver.errors import ModelError, NumericsError, ShapeError, SolverError
from solver.fracops import AbcWeights, TimeGrid, apply_abc_left
from solver.mesh import (
    BoundaryControl,
    SpaceGrid,
    check_field,
    integrate_domain,
    laplacian_robin_matrix,
    neumann_matrix,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_PICARD = 50

ControlLike = Union[BoundaryControl, np.ndarray]
SourceLike = Union[np.ndarray, Callable[[int], np.ndarray]]


def control_values(beta: ControlLike, grid: SpaceGrid, time: TimeGrid) -> np.ndarray:
    """Raw beta array of shape (n_steps + 1, n_boundary)."""
    values = beta.values if isinstance(beta, BoundaryControl) else np.asarray(beta, dtype=float)
    expected = (time.n_steps + 1, grid.n_boundary)
    if values.shape != expected:
        raise ShapeError(f"control must have shape {expected}, got {values.shape}")
    return values


@dataclass(eq=False)
class StateTrajectory:
    """Full time history of the temperature, time-major: ``u[n, i]``."""
    grid: SpaceGrid
    time: TimeGrid
    u: np.ndarray
    lam: float
    source: np.ndarray
    picard_iterations: List[int] = field(default_factory=list)
    contraction: List[float] = field(default_factory=list)
    energy: Dict[str, float] = field(default_factory=dict)

    @property
    def boundary(self) -> np.ndarray:
        return self.u[:, self.grid.boundary_nodes]


class StepOperator:
    """Sparse LU factors of ``leading * I + A(beta) + diag(shift)``, reused
    while consecutive steps share the same control slice."""

    def __init__(self, grid: SpaceGrid, leading: float):
        self.grid = grid
        self.leading = leading
        self.stiffness = neumann_matrix(grid)
        self._key = None
        self._lu = None
        self.matrix = None

    def factor(self, beta_slice: np.ndarray, shift: Optional[np.ndarray] = None):
        key = (beta_slice.tobytes(), None if shift is None else shift.tobytes())
        if key == self._key:
            return self._lu
        matrix = laplacian_robin_matrix(self.grid, beta_slice)
        diagonal = np.full(self.grid.n_nodes, self.leading)
        if shift is not None:
            diagonal = diagonal + shift
        matrix = (matrix + sparse.diags(diagonal)).tocsc()
        try:
            self._lu = sparse_linalg.splu(matrix)
        except RuntimeError as e:
            raise NumericsError(f"sparse factorization failed: {str(e)}")
        self._key = key
        self.matrix = matrix
        return self._lu


def nonlocal_source(grid: SpaceGrid, u_slice: np.ndarray, model: ConductivityModel,
                    lam: float) -> np.ndarray:
    """Nonlocal Joule source lambda f(u) / (int_Omega f(u) dx)^2.

    Args:
        grid: Space grid
        u_slice: Temperature at one time node
        model: Conductivity model
        lam: Dimensionless parameter lambda

    Returns:
        Source field on the grid nodes
    """
    values = np.asarray(model.eval(check_field(grid, u_slice)), dtype=float)
    model.check_values(values)
    total = integrate_domain(grid, values)
    if total <= 0:
        raise ModelError(f"integral of f(u) must be positive, got {total}")
    return lam * values / total ** 2


def source_bounds(grid: SpaceGrid, model: ConductivityModel, lam: float):
    """Bounds lam c1/(c2|Omega|)^2 <= g <= lam c2/(c1|Omega|)^2."""
    volume = grid.volume
    return lam * model.c1 / (model.c2 * volume) ** 2, lam * model.c2 / (model.c1 * volume) ** 2


def _fixed_source(source: SourceLike, n: int) -> np.ndarray:
    return source(n) if callable(source) else np.asarray(source, dtype=float)


def solve_state(grid: SpaceGrid, time: TimeGrid, weights: AbcWeights, beta: ControlLike,
                u0: np.ndarray, model: ConductivityModel, lam: float,
                tol: float = DEFAULT_TOL, max_picard: int = DEFAULT_MAX_PICARD,
                source: Optional[SourceLike] = None) -> StateTrajectory:
    """Time-step the state equation with Picard iteration on the nonlocal term.

    At each node n >= 1 solves
    ``w[n][n] u_n - Lap_Robin u_n = g(u_n) - sum_{j<n} w[n][j] u_j``
    freezing g at the previous Picard iterate, warm-started from u_{n-1}.
    A fixed ``source`` (array or callable of n) replaces g(u) for linear runs.
    """
    if weights.grid != time:
        raise ShapeError("weights were built for a different time grid")
    if tol <= 0:
        raise ValueError(f"Picard tolerance must be positive, got {tol}")
    beta_values = control_values(beta, grid, time)
    u0 = check_field(grid, u0)

    n_steps, n_nodes = time.n_steps, grid.n_nodes
    u = np.empty((n_steps + 1, n_nodes))
    u[0] = u0
    increments = np.zeros((n_steps, n_nodes))
    sources = np.empty((n_steps + 1, n_nodes))
    sources[0] = _fixed_source(source, 0) if source is not None else nonlocal_source(grid, u0, model, lam)

    operator = StepOperator(grid, weights.leading)
    iterations, factors = [], []
    for n in range(1, n_steps + 1):
        lu = operator.factor(beta_values[n])
        memory = weights.leading * u[n - 1] - weights.history(n, increments)
        current = u[n - 1].copy()
        changes = []
        for _ in range(max_picard):
            g = _fixed_source(source, n) if source is not None else nonlocal_source(grid, current, model, lam)
            updated = lu.solve(g + memory)
            if not np.all(np.isfinite(updated)):
                raise NumericsError(f"non-finite state at time node {n}")
            changes.append(float(np.max(np.abs(updated - current))))
            current = updated
            if changes[-1] < tol:
                break
        else:
            raise SolverError(
                f"Picard iteration did not reach {tol:g} within {max_picard} iterations at time node {n}",
                residual_history=changes,
            )
        factor = _contraction_factor(changes, tol)
        if factor >= 1.0:
            raise SolverError(
                f"Picard map is not contracting at time node {n} (factor {factor:.3g})",
                residual_history=changes,
            )
        u[n] = current
        increments[n - 1] = u[n] - u[n - 1]
        sources[n] = g
        iterations.append(len(changes))
        factors.append(factor)

    trajectory = StateTrajectory(
        grid=grid, time=time, u=u, lam=lam, source=sources,
        picard_iterations=iterations, contraction=factors,
    )
    trajectory.energy = energy_monitor(trajectory)
    logger.info(
        "state solved: %d steps, max Picard %d, max contraction %.3g, mu2 %.4g",
        n_steps, max(iterations), max(factors), trajectory.energy["mu2"],
    )
    return trajectory


def _contraction_factor(changes: List[float], tol: float) -> float:
    ratios = [
        changes[k] / changes[k - 1]
        for k in range(1, len(changes))
        if changes[k - 1] > 100.0 * tol
    ]
    return max(ratios) if ratios else 0.0


def energy_monitor(trajectory: StateTrajectory) -> Dict[str, float]:
    """Energy-estimate ratios of the computed trajectory.

    mu1 bounds sup_t ||u(t)|| and mu2 bounds ||u||_{L2(Q_T)}, both relative
    to ||u0|| + ||g||_{L2(Q_T)}. They are reported, not asserted.
    """
    w = trajectory.grid.domain_weights
    tau = trajectory.time.trapezoid_weights
    u_norms = np.sqrt(np.square(trajectory.u) @ w)
    g_norms = np.sqrt(np.square(trajectory.source) @ w)
    u0_norm = float(u_norms[0])
    g_total = float(np.sqrt(tau @ np.square(g_norms)))
    u_total = float(np.sqrt(tau @ np.square(u_norms)))
    data = u0_norm + g_total
    return {
        "sup_l2": float(u_norms.max()),
        "l2_qt": u_total,
        "u0_l2": u0_norm,
        "source_l2_qt": g_total,
        "mu1": float(u_norms.max()) / data if data > 0 else 0.0,
        "mu2": u_total / data if data > 0 else 0.0,
        "max_contraction": float(max(trajectory.contraction, default=0.0)),
    }


def weak_form_residual(trajectory: StateTrajectory, weights: AbcWeights, beta: ControlLike,
                       model: ConductivityModel, source: Optional[SourceLike] = None) -> float:
    """Largest weak-form residual over nodal test functions and time nodes.

    Tests the trajectory against every nodal basis function: fractional
    term, stiffness, boundary term and nonlocal source. Each residual is
    normalized by the mass of its test function.
    """
    grid, time = trajectory.grid, trajectory.time
    beta_values = control_values(beta, grid, time)
    w = grid.domain_weights
    stiffness = sparse.diags(w) @ neumann_matrix(grid)
    derivative = apply_abc_left(weights, trajectory.u)
    nodes = grid.boundary_nodes
    worst = 0.0
    for n in range(1, time.n_steps + 1):
        u_n = trajectory.u[n]
        if source is not None:
            g = _fixed_source(source, n)
        else:
            g = nonlocal_source(grid, u_n, model, trajectory.lam)
        residual = w * (derivative[n] - g) + stiffness @ u_n
        residual[nodes] += beta_values[n] * grid.boundary_weights * u_n[nodes]
        worst = max(worst, float(np.max(np.abs(residual) / w)))
    return worst
