"""Projected gradient descent with Armijo backtracking over the control box."""
import logging
from typing import Optional, Tuple

import numpy as np

from config.run_config import OptimizerConfig
from optimization.cost import (
    CostBreakdown,
    control_gradient,
    evaluate_cost,
    inner_boundary,
    kkt_report,
    project_box,
    projected_step_norm,
)
from optimization.problem import ControlProblem
from optimization.report import IterateRecord, Method, OptimizationReport, assert_admissible
from solver.errors import ConfigError
from solver.mesh import BoundaryControl
from solver.state import StateTrajectory

logger = logging.getLogger(__name__)


def check_start(problem: ControlProblem, initial: BoundaryControl) -> None:
    if (initial.lower, initial.upper) != (problem.lower, problem.upper):
        raise ConfigError(
            f"initial control box [{initial.lower}, {initial.upper}] differs from "
            f"the problem box [{problem.lower}, {problem.upper}]"
        )
    initial.check_grid(problem.grid, problem.n_times)
    assert_admissible(initial)


def _armijo(problem: ControlProblem, beta: BoundaryControl, gradient: np.ndarray,
            cost: float, options: OptimizerConfig
            ) -> Optional[Tuple[BoundaryControl, StateTrajectory, CostBreakdown, float]]:
    """Backtrack along the projected path until sufficient decrease."""
    step = options.initial_step
    for _ in range(options.max_backtracks):
        trial = project_box(beta.values - step * gradient, beta.lower, beta.upper)
        slope = inner_boundary(problem.grid, problem.time, gradient, trial.values - beta.values)
        state = problem.solve(trial)
        trial_cost = evaluate_cost(state, trial, problem.grid, problem.time)
        if trial_cost.total < cost and trial_cost.total <= cost + options.armijo_c * slope:
            return trial, state, trial_cost, step
        logger.debug("backtrack: step %.3g gives J=%.10g (J0=%.10g)", step, trial_cost.total, cost)
        step *= options.shrink
    return None


def minimize(problem: ControlProblem, initial: BoundaryControl,
             options: Optional[OptimizerConfig] = None) -> OptimizationReport:
    """Minimize J over the admissible box by projected gradient descent.

    Each iteration solves the state and the adjoint, forms the gradient and
    backtracks on J along P(beta - s grad J). Stops when the sup-norm of
    P(beta - grad J) - beta drops below ``tol_opt``.

    Args:
        problem: Discretized control problem
        initial: Admissible starting control
        options: Optimizer settings (defaults when omitted)

    Returns:
        OptimizationReport; ``converged`` is False after a line-search
        failure or when the iteration budget runs out
    """
    options = options or OptimizerConfig()
    check_start(problem, initial)
    grid, time = problem.grid, problem.time

    beta = initial
    state = problem.solve(beta)
    cost = evaluate_cost(state, beta, grid, time)
    iterates = []
    step = 0.0
    converged, message = False, ""
    for iteration in range(options.max_iters + 1):
        adjoint = problem.adjoint(state, beta)
        gradient = control_gradient(state, adjoint, beta)
        norm = projected_step_norm(beta, gradient)
        iterates.append(IterateRecord(iteration, cost.total, norm, step, beta.active_fraction()))
        logger.info("iter %3d  J=%.12g  |Pg|=%.3e  step=%.3g", iteration, cost.total, norm, step)

        if norm < options.tol_opt:
            converged, message = True, f"projected gradient below {options.tol_opt:g}"
            break
        if iteration == options.max_iters:
            message = f"stopped after {options.max_iters} iterations"
            break
        accepted = _armijo(problem, beta, gradient, cost.total, options)
        if accepted is None:
            message = f"line search failed after {options.max_backtracks} backtracks"
            logger.warning("%s at iteration %d (|Pg|=%.3e)", message, iteration, norm)
            break
        beta, state, cost, step = accepted
        assert_admissible(beta)

    return OptimizationReport(
        method=Method.PROJECTED_GRADIENT,
        beta=beta,
        converged=converged,
        message=message,
        iterates=iterates,
        cost=cost,
        state=state,
        adjoint=adjoint,
        gradient=gradient,
        kkt=kkt_report(beta, gradient, options.tol_kkt),
    )
