"""Discretized control problem assembled from a run configuration."""
import logging
from dataclasses import dataclass

import numpy as np

from config.run_config import InitialConfig, RunConfig
from solver.adjoint import AdjointTrajectory, solve_adjoint
from solver.conductivity import ConductivityModel, build_model
from solver.errors import ConfigError
from solver.fracops import (
    AbcWeights,
    FractionalOrder,
    TimeGrid,
    build_abc_weights,
    build_backward_euler_weights,
)
from solver.mesh import BoundaryControl, SpaceGrid, build_grid
from solver.state import ControlLike, StateTrajectory, solve_state

logger = logging.getLogger(__name__)

GAUSSIAN_WIDTH = 0.1


def initial_temperature(grid: SpaceGrid, initial: InitialConfig) -> np.ndarray:
    """Nodal u0 for the configured shape.

    ``constant`` gives the value everywhere, ``cosine`` adds
    amplitude * prod_d cos(pi x_d / L_d) and ``gaussian`` adds a bump of
    relative width 0.1 centred in the domain.
    """
    u0 = np.full(grid.n_nodes, float(initial.value))
    if initial.kind == "constant":
        return u0
    extents = np.asarray(grid.extents)
    if initial.kind == "cosine":
        shape = np.prod(np.cos(np.pi * grid.coords / extents), axis=1)
    elif initial.kind == "gaussian":
        offset = (grid.coords - 0.5 * extents) / (GAUSSIAN_WIDTH * extents)
        shape = np.exp(-0.5 * np.sum(np.square(offset), axis=1))
    else:
        raise ConfigError(f"unknown initial condition kind {initial.kind!r}")
    return u0 + float(initial.amplitude) * shape


@dataclass(eq=False)
class ControlProblem:
    """Everything needed to map a control to its state, adjoint and cost."""
    grid: SpaceGrid
    time: TimeGrid
    weights: AbcWeights
    u0: np.ndarray
    model: ConductivityModel
    lam: float
    lower: float
    upper: float
    picard_tol: float = 1e-10
    max_picard: int = 50

    @classmethod
    def from_config(cls, config: RunConfig) -> "ControlProblem":
        """Build grids, weights, model and initial data from a validated config."""
        grid = build_grid(config.grid.extents, config.grid.n_cells)
        time = TimeGrid(float(config.time.t_final), int(config.time.n_steps))
        if config.classical:
            weights = build_backward_euler_weights(time)
        else:
            weights = build_abc_weights(FractionalOrder(config.alpha, config.kernel), time)
        model = build_model(
            config.conductivity.preset,
            value=config.conductivity.value,
            points=config.conductivity.points,
            values=config.conductivity.values,
        )
        logger.info(
            "problem: %dD grid %s, %d steps to T=%g, %s",
            grid.dim, grid.n_cells, time.n_steps, time.t_final,
            "classical" if config.classical else f"alpha={config.alpha} ({config.kernel})",
        )
        return cls(
            grid=grid,
            time=time,
            weights=weights,
            u0=initial_temperature(grid, config.initial),
            model=model,
            lam=float(config.lam),
            lower=float(config.control.lower),
            upper=float(config.control.upper),
            picard_tol=float(config.solver.picard_tol),
            max_picard=int(config.solver.max_picard),
        )

    @property
    def n_times(self) -> int:
        return self.time.n_steps + 1

    def constant_control(self, value: float) -> BoundaryControl:
        return BoundaryControl.constant(self.grid, self.n_times, value, self.lower, self.upper)

    def project(self, raw) -> BoundaryControl:
        return BoundaryControl.projected(raw, self.lower, self.upper)

    def solve(self, beta: ControlLike) -> StateTrajectory:
        return solve_state(
            self.grid, self.time, self.weights, beta, self.u0, self.model, self.lam,
            tol=self.picard_tol, max_picard=self.max_picard,
        )

    def adjoint(self, state: StateTrajectory, beta: ControlLike) -> AdjointTrajectory:
        return solve_adjoint(state, beta, self.model, self.lam, self.weights)
