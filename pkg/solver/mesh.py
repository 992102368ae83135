"""Uniform node grids, the Robin Laplacian and quadrature on intervals and rectangles."""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import sparse

from solver.errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)

MIN_CELLS = 4

ScalarField = np.ndarray


@dataclass(frozen=True, eq=False)
class SpaceGrid:
    """Node grid with interior/boundary classification and quadrature.

    Nodes are ordered with the last axis fastest: node (i, j) of a 2D grid
    has index ``i * (n_y + 1) + j``. Boundary nodes carry their unit
    outward normal; corner normals are the normalized average of the two
    edge normals.
    """
    dim: int
    extents: Tuple[float, ...]
    n_cells: Tuple[int, ...]
    coords: np.ndarray
    boundary_nodes: np.ndarray
    interior_nodes: np.ndarray
    normals: np.ndarray
    domain_weights: np.ndarray
    boundary_weights: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary_nodes.shape[0]

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple(e / n for e, n in zip(self.extents, self.n_cells))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(n + 1 for n in self.n_cells)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))

    @property
    def perimeter(self) -> float:
        if self.dim == 1:
            return 2.0
        return 2.0 * float(sum(self.extents))

    def boundary_trace(self, field: ScalarField) -> np.ndarray:
        """Values of a nodal field (or trajectory, time-major) on boundary nodes."""
        field = np.asarray(field, dtype=float)
        if field.shape[-1] != self.n_nodes:
            raise ShapeError(f"field has {field.shape[-1]} nodes, grid has {self.n_nodes}")
        return field[..., self.boundary_nodes]


def _trapezoid_1d(n: int, h: float) -> np.ndarray:
    weights = np.full(n + 1, h)
    weights[0] = weights[-1] = 0.5 * h
    return weights


def build_grid(extents: Sequence[float], n_cells: Sequence[int]) -> SpaceGrid:
    """Build a uniform 1D or 2D grid.

    Args:
        extents: Physical length per axis
        n_cells: Number of cells per axis (>= 4)

    Returns:
        SpaceGrid with classification and quadrature weights
    """
    extents = tuple(float(e) for e in extents)
    n_cells = tuple(int(n) for n in n_cells)
    errors = []
    if len(extents) not in (1, 2) or len(extents) != len(n_cells):
        errors.append(f"grid needs 1 or 2 axes with matching extents/n_cells, got {extents} / {n_cells}")
    errors += [f"extent {e} must be positive" for e in extents if not (np.isfinite(e) and e > 0)]
    errors += [f"n_cells {n} must be at least {MIN_CELLS}" for n in n_cells if n < MIN_CELLS]
    if errors:
        raise ConfigError(errors)

    dim = len(extents)
    h = [e / n for e, n in zip(extents, n_cells)]
    axes = [np.linspace(0.0, e, n + 1) for e, n in zip(extents, n_cells)]

    if dim == 1:
        coords = axes[0][:, None]
        boundary = np.array([0, n_cells[0]])
        normals = np.array([[-1.0], [1.0]])
        domain_weights = _trapezoid_1d(n_cells[0], h[0])
        boundary_weights = np.ones(2)
    else:
        nx, ny = n_cells
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        coords = np.column_stack([xx.ravel(), yy.ravel()])
        domain_weights = np.outer(_trapezoid_1d(nx, h[0]), _trapezoid_1d(ny, h[1])).ravel()

        ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
        ii, jj = ii.ravel(), jj.ravel()
        normal_x = np.where(ii == 0, -1.0, np.where(ii == nx, 1.0, 0.0))
        normal_y = np.where(jj == 0, -1.0, np.where(jj == ny, 1.0, 0.0))
        on_boundary = (normal_x != 0) | (normal_y != 0)
        boundary = np.flatnonzero(on_boundary)
        raw = np.column_stack([normal_x[boundary], normal_y[boundary]])
        normals = raw / np.linalg.norm(raw, axis=1)[:, None]
        # edge trapezoid: full spacing along the edge, half per incident edge at corners
        boundary_weights = np.abs(normal_x[boundary]) * np.where(
            (jj[boundary] == 0) | (jj[boundary] == ny), 0.5 * h[1], h[1]
        ) + np.abs(normal_y[boundary]) * np.where(
            (ii[boundary] == 0) | (ii[boundary] == nx), 0.5 * h[0], h[0]
        )

    interior = np.setdiff1d(np.arange(coords.shape[0]), boundary)
    grid = SpaceGrid(
        dim=dim,
        extents=extents,
        n_cells=n_cells,
        coords=coords,
        boundary_nodes=boundary,
        interior_nodes=interior,
        normals=normals,
        domain_weights=domain_weights,
        boundary_weights=boundary_weights,
    )
    logger.debug("built %dD grid with %d nodes (%d boundary)", dim, grid.n_nodes, grid.n_boundary)
    return grid


def _neumann_1d(n: int, h: float) -> sparse.csr_matrix:
    main = np.full(n + 1, 2.0)
    upper = np.full(n, -1.0)
    lower = np.full(n, -1.0)
    # ghost elimination doubles the inward coupling at both ends
    upper[0] = -2.0
    lower[-1] = -2.0
    return sparse.diags([lower, main, upper], [-1, 0, 1], format="csr") / h ** 2


def neumann_matrix(grid: SpaceGrid) -> sparse.csr_matrix:
    """Discrete -Laplacian with homogeneous Neumann data (beta = 0)."""
    h = grid.spacing
    if grid.dim == 1:
        return _neumann_1d(grid.n_cells[0], h[0])
    kx = _neumann_1d(grid.n_cells[0], h[0])
    ky = _neumann_1d(grid.n_cells[1], h[1])
    eye_x = sparse.identity(grid.n_cells[0] + 1, format="csr")
    eye_y = sparse.identity(grid.n_cells[1] + 1, format="csr")
    return (sparse.kron(kx, eye_y) + sparse.kron(eye_x, ky)).tocsr()


def _check_boundary(grid: SpaceGrid, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n_boundary,):
        raise ShapeError(f"boundary field must have shape ({grid.n_boundary},), got {values.shape}")
    return values


def robin_diagonal(grid: SpaceGrid, beta_slice) -> np.ndarray:
    """Nodal Robin term beta * boundary_weight / domain_weight (zero inside)."""
    beta_slice = _check_boundary(grid, beta_slice)
    diagonal = np.zeros(grid.n_nodes)
    nodes = grid.boundary_nodes
    diagonal[nodes] = beta_slice * grid.boundary_weights / grid.domain_weights[nodes]
    return diagonal


def laplacian_robin_matrix(grid: SpaceGrid, beta_slice) -> sparse.csr_matrix:
    """Sparse discrete -Laplacian with the Robin condition du/dnu = -beta u."""
    return (neumann_matrix(grid) + sparse.diags(robin_diagonal(grid, beta_slice))).tocsr()


def apply_laplacian_robin(grid: SpaceGrid, u: ScalarField, beta_slice) -> ScalarField:
    """Apply the discrete -Laplacian with the Robin condition folded in.

    At a boundary node the exterior neighbour is replaced by the ghost value
    u_inner - 2 h beta u_bnd.
    """
    u = check_field(grid, u)
    return laplacian_robin_matrix(grid, beta_slice) @ u


def check_field(grid: SpaceGrid, field) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.n_nodes,):
        raise ShapeError(f"field must have shape ({grid.n_nodes},), got {field.shape}")
    return field


def integrate_domain(grid: SpaceGrid, field: ScalarField) -> float:
    """Trapezoid quadrature of a nodal field over the domain."""
    return float(grid.domain_weights @ check_field(grid, field))


def integrate_boundary(grid: SpaceGrid, field) -> float:
    """Quadrature over the boundary; accepts a nodal field or boundary values."""
    field = np.asarray(field, dtype=float)
    if field.shape == (grid.n_nodes,):
        field = field[grid.boundary_nodes]
    return float(grid.boundary_weights @ _check_boundary(grid, field))


def inner(grid: SpaceGrid, u: ScalarField, v: ScalarField) -> float:
    """Discrete L2(Omega) inner product."""
    return float(np.sum(grid.domain_weights * check_field(grid, u) * check_field(grid, v)))


@dataclass(eq=False)
class BoundaryControl:
    """Robin coefficient beta on boundary nodes at every time node.

    ``values[n, b]`` is beta at time node n and boundary node b; every value
    lies in the box [lower, upper] with lower > 0.
    """
    values: np.ndarray
    lower: float
    upper: float

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if not (0 < self.lower <= self.upper):
            raise ConfigError(f"control bounds must satisfy 0 < m <= M, got m={self.lower}, M={self.upper}")
        if self.values.ndim != 2 or not np.all(np.isfinite(self.values)):
            raise ShapeError(f"control values must be a finite 2D array, got shape {self.values.shape}")
        if self.values.min() < self.lower or self.values.max() > self.upper:
            raise ConfigError(
                f"control leaves the admissible box [{self.lower}, {self.upper}]: "
                f"range [{self.values.min():.6g}, {self.values.max():.6g}]"
            )

    @classmethod
    def constant(cls, grid: SpaceGrid, n_times: int, value: float,
                 lower: float, upper: float) -> "BoundaryControl":
        return cls(np.full((n_times, grid.n_boundary), float(value)), lower, upper)

    @classmethod
    def projected(cls, raw, lower: float, upper: float) -> "BoundaryControl":
        return cls(np.clip(np.asarray(raw, dtype=float), lower, upper), lower, upper)

    @property
    def n_times(self) -> int:
        return self.values.shape[0]

    def active_mask(self, rtol: float = 0.0) -> np.ndarray:
        """Nodes sitting on either bound."""
        span = rtol * (self.upper - self.lower)
        return (self.values <= self.lower + span) | (self.values >= self.upper - span)

    def active_fraction(self) -> float:
        return float(np.mean(self.active_mask()))

    def check_grid(self, grid: SpaceGrid, n_times: int) -> None:
        if self.values.shape != (n_times, grid.n_boundary):
            raise ShapeError(
                f"control must have shape ({n_times}, {grid.n_boundary}), got {self.values.shape}"
            )
