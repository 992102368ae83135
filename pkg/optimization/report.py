"""Optimization result records."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from optimization.cost import CostBreakdown
from solver.adjoint import AdjointTrajectory
from solver.errors import NumericsError
from solver.mesh import BoundaryControl
from solver.state import StateTrajectory


class Method(Enum):
    """Optimizer used to produce a report."""
    PROJECTED_GRADIENT = "projected_gradient"
    FORWARD_BACKWARD_SWEEP = "fbs"


@dataclass(frozen=True)
class IterateRecord:
    """One row of the optimization trace."""
    iteration: int
    cost: float
    grad_norm: float
    step: float
    active_fraction: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iter": self.iteration,
            "J": self.cost,
            "grad_norm": self.grad_norm,
            "step": self.step,
            "active_fraction": self.active_fraction,
        }


@dataclass(eq=False)
class OptimizationReport:
    """Iterates, final control and convergence status of one optimizer run.

    ``grad_norm`` in every record is the sup-norm of the projected gradient
    step P(beta - grad J) - beta.
    """
    method: Method
    beta: BoundaryControl
    converged: bool
    message: str
    iterates: List[IterateRecord] = field(default_factory=list)
    cost: Optional[CostBreakdown] = None
    state: Optional[StateTrajectory] = None
    adjoint: Optional[AdjointTrajectory] = None
    gradient: Optional[np.ndarray] = None
    kkt: Dict[str, Any] = field(default_factory=dict)

    @property
    def final_cost(self) -> float:
        return self.iterates[-1].cost if self.iterates else float("nan")

    @property
    def costs(self) -> List[float]:
        return [record.cost for record in self.iterates]

    def is_monotone(self) -> bool:
        """Costs never increase across recorded iterates."""
        costs = self.costs
        return all(b <= a for a, b in zip(costs, costs[1:]))

    def to_dict(self) -> Dict[str, Any]:
        """Summary without the trajectories."""
        return {
            "method": self.method.value,
            "converged": self.converged,
            "message": self.message,
            "iterations": len(self.iterates) - 1 if self.iterates else 0,
            "final_cost": self.final_cost,
            "cost": self.cost.to_dict() if self.cost else None,
            "final_grad_norm": self.iterates[-1].grad_norm if self.iterates else None,
            "active_fraction": self.beta.active_fraction(),
            "kkt": self.kkt,
        }


def assert_admissible(beta: BoundaryControl) -> None:
    """Every value inside [lower, upper]."""
    values = beta.values
    if not (np.all(values >= beta.lower) and np.all(values <= beta.upper)):
        raise NumericsError(
            f"iterate left the admissible box [{beta.lower}, {beta.upper}]: "
            f"range [{values.min():.6g}, {values.max():.6g}]"
        )
