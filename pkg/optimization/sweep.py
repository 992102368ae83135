"""Forward-backward sweep on the optimality system."""
import logging
from typing import Optional

import numpy as np

from config.run_config import OptimizerConfig
from optimization.cost import (
    control_gradient,
    evaluate_cost,
    kkt_report,
    project_box,
    projected_step_norm,
)
from optimization.descent import check_start
from optimization.problem import ControlProblem
from optimization.report import IterateRecord, Method, OptimizationReport, assert_admissible
from solver.adjoint import staggered_product
from solver.errors import ConfigError, SweepDivergenceError
from solver.mesh import BoundaryControl

logger = logging.getLogger(__name__)


def forward_backward_sweep(problem: ControlProblem, initial: BoundaryControl,
                           options: Optional[OptimizerConfig] = None) -> OptimizationReport:
    """Iterate beta <- P((1 - w) beta + w u v / 2) until beta settles.

    Args:
        problem: Discretized control problem
        initial: Admissible starting control
        options: Optimizer settings; ``relaxation`` is w in (0, 1]

    Returns:
        OptimizationReport; converged once successive controls differ by
        less than ``tol_opt`` in sup-norm

    Raises:
        SweepDivergenceError: the change grew for ``divergence_patience``
            consecutive sweeps
    """
    options = options or OptimizerConfig()
    omega = options.relaxation
    if not 0.0 < omega <= 1.0:
        raise ConfigError(f"relaxation must lie in (0, 1], got {omega}")
    check_start(problem, initial)
    grid, time = problem.grid, problem.time

    beta = initial
    changes, iterates = [], []
    growing = 0
    converged, message = False, ""
    for iteration in range(options.max_iters + 1):
        state = problem.solve(beta)
        adjoint = problem.adjoint(state, beta)
        gradient = control_gradient(state, adjoint, beta)
        cost = evaluate_cost(state, beta, grid, time)
        norm = projected_step_norm(beta, gradient)
        iterates.append(IterateRecord(
            iteration, cost.total, norm, omega if iteration else 0.0, beta.active_fraction(),
        ))
        logger.info(
            "sweep %3d  J=%.12g  |Pg|=%.3e  change=%.3e",
            iteration, cost.total, norm, changes[-1] if changes else float("nan"),
        )
        if changes and changes[-1] < options.tol_opt:
            converged, message = True, f"control change below {options.tol_opt:g}"
            break
        if iteration == options.max_iters:
            message = f"stopped after {options.max_iters} sweeps"
            break

        target = 0.5 * staggered_product(state, adjoint)
        updated = project_box((1.0 - omega) * beta.values + omega * target, beta.lower, beta.upper)
        assert_admissible(updated)
        changes.append(float(np.max(np.abs(updated.values - beta.values))))
        growing = growing + 1 if len(changes) > 1 and changes[-1] > changes[-2] else 0
        if growing >= options.divergence_patience:
            raise SweepDivergenceError(
                f"forward-backward sweep oscillates (change grew {growing} times in a row, "
                f"last {changes[-1]:.3e}); reduce the relaxation omega (currently {omega})",
                residual_history=changes,
            )
        beta = updated

    return OptimizationReport(
        method=Method.FORWARD_BACKWARD_SWEEP,
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
