"""Cost functional, control gradient and finite-difference gradient checks."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from solver.adjoint import AdjointTrajectory, staggered_product
from solver.errors import ShapeError
from solver.fracops import TimeGrid
from solver.mesh import BoundaryControl, SpaceGrid
from solver.state import ControlLike, StateTrajectory, control_values

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CostBreakdown:
    """J(beta) = int_Q u dx dt + int_S beta^2 ds dt."""
    state_term: float
    control_term: float

    @property
    def total(self) -> float:
        return self.state_term + self.control_term

    def to_dict(self) -> Dict[str, float]:
        return {
            "state_term": self.state_term,
            "control_term": self.control_term,
            "total": self.total,
        }


def evaluate_cost(state: StateTrajectory, beta: ControlLike, grid: SpaceGrid,
                  time: TimeGrid) -> CostBreakdown:
    """Time-trapezoid times space-quadrature evaluation of both cost terms.

    Args:
        state: State solved for beta
        beta: Control (BoundaryControl or raw array)
        grid: Space grid the state lives on
        time: Time grid the state lives on

    Returns:
        CostBreakdown with total = state_term + control_term
    """
    if state.grid is not grid or state.time != time:
        raise ShapeError("state trajectory belongs to a different grid")
    values = control_values(beta, grid, time)
    tau = time.trapezoid_weights
    state_term = float(tau @ (state.u @ grid.domain_weights))
    control_term = float(tau @ (np.square(values) @ grid.boundary_weights))
    return CostBreakdown(state_term=state_term, control_term=control_term)


def control_gradient(state: StateTrajectory, adjoint: AdjointTrajectory,
                     beta: ControlLike) -> np.ndarray:
    """Gradient density 2 beta - u v on the boundary at every time node.

    The u v product is the staggered pairing of the discrete adjoint, so
    ``inner_boundary(gradient, l)`` is the exact directional derivative of
    the discrete cost.
    """
    if state is None or adjoint is None:
        raise ShapeError("control gradient needs both the state and the adjoint trajectory")
    values = control_values(beta, state.grid, state.time)
    return 2.0 * values - staggered_product(state, adjoint)


def inner_boundary(grid: SpaceGrid, time: TimeGrid, a: np.ndarray, b: np.ndarray) -> float:
    """Discrete L2(S_T) inner product of two boundary fields over time."""
    return float(time.trapezoid_weights @ ((np.asarray(a) * np.asarray(b)) @ grid.boundary_weights))


def project_box(beta_raw, lower: float, upper: float) -> BoundaryControl:
    """Pointwise clamp to [lower, upper]."""
    return BoundaryControl.projected(beta_raw, lower, upper)


def projected_step_norm(beta: BoundaryControl, gradient: np.ndarray) -> float:
    """Sup-norm of P(beta - grad J) - beta, zero exactly at stationary points."""
    projected = np.clip(beta.values - gradient, beta.lower, beta.upper)
    return float(np.max(np.abs(projected - beta.values)))


def kkt_report(beta: BoundaryControl, gradient: np.ndarray, tol_kkt: float) -> Dict[str, float]:
    """First-order conditions at a box-constrained point.

    Inactive nodes need |grad| <= tol_kkt, nodes on the lower bound need
    grad >= -tol_kkt and nodes on the upper bound grad <= tol_kkt.
    """
    lower = beta.values <= beta.lower
    upper = beta.values >= beta.upper
    inactive = ~(lower | upper)
    inactive_max = float(np.max(np.abs(gradient[inactive]))) if inactive.any() else 0.0
    lower_min = float(np.min(gradient[lower])) if lower.any() else 0.0
    upper_max = float(np.max(gradient[upper])) if upper.any() else 0.0
    return {
        "inactive_max_abs": inactive_max,
        "lower_min": lower_min,
        "upper_max": upper_max,
        "active_fraction": float(np.mean(lower | upper)),
        "tol_kkt": tol_kkt,
        "passed": bool(inactive_max <= tol_kkt and lower_min >= -tol_kkt and upper_max <= tol_kkt),
    }


@dataclass(frozen=True)
class DirectionalCheck:
    """Adjoint directional derivative against a central difference."""
    adjoint: float
    finite_difference: float

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.finite_difference), np.finfo(float).tiny)
        return abs(self.adjoint - self.finite_difference) / scale


def random_directions(shape, count: int, seed: int) -> List[np.ndarray]:
    """Seeded directions with entries uniform in [-1, 1]."""
    rng = np.random.default_rng(seed)
    return [rng.uniform(-1.0, 1.0, size=shape) for _ in range(count)]


def gradient_check(problem, beta: BoundaryControl, directions: List[np.ndarray],
                   eps: float = 1e-4, gradient: Optional[np.ndarray] = None) -> List[DirectionalCheck]:
    """Compare <grad J, l> with (J(beta + eps l) - J(beta - eps l)) / (2 eps).

    Args:
        problem: ControlProblem used for every solve
        beta: Base control, ideally away from the box bounds
        directions: Boundary fields l of shape (n_steps + 1, n_boundary)
        eps: Perturbation size
        gradient: Precomputed gradient at beta, solved when omitted

    Returns:
        One DirectionalCheck per direction
    """
    grid, time = problem.grid, problem.time
    if gradient is None:
        state = problem.solve(beta)
        gradient = control_gradient(state, problem.adjoint(state, beta), beta)

    def cost(values: np.ndarray) -> float:
        return evaluate_cost(problem.solve(values), values, grid, time).total

    checks = []
    for direction in directions:
        plus = cost(beta.values + eps * direction)
        minus = cost(beta.values - eps * direction)
        check = DirectionalCheck(
            adjoint=inner_boundary(grid, time, gradient, direction),
            finite_difference=(plus - minus) / (2.0 * eps),
        )
        logger.info(
            "gradient check: adjoint %.8e, FD %.8e, rel err %.2e",
            check.adjoint, check.finite_difference, check.relative_error,
        )
        checks.append(check)
    return checks
