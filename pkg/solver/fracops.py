"""Discrete ABC fractional derivatives and the ABC fractional integral."""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import special

from solver import mlf
from solver.errors import DomainError, ShapeError

logger = logging.getLogger(__name__)

ALPHA_MAX = 1.0 - 1.0e-6
KERNELS = ("standard", "two_parameter")
GAUSS_POINTS = 16


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha of the ABC operators and its derived constants.

    ``kernel`` selects the memory kernel: ``"standard"`` uses
    E_alpha(-gamma s^alpha), ``"two_parameter"`` uses E_{alpha,alpha}.
    """
    alpha: float
    kernel: str = "standard"

    def __post_init__(self):
        alpha = self.alpha
        if not np.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"fractional order must be in (0, 1), got {alpha}")
        if alpha >= 1.0:
            raise DomainError(
                f"fractional order {alpha} is not below 1; use classical mode "
                "(--classical) for the ordinary time derivative"
            )
        if alpha > ALPHA_MAX:
            raise DomainError(f"fractional order must not exceed {ALPHA_MAX}, got {alpha}")
        if self.kernel not in KERNELS:
            raise DomainError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")

    @property
    def gamma(self) -> float:
        return self.alpha / (1.0 - self.alpha)

    @property
    def b_alpha(self) -> float:
        return (1.0 - self.alpha) + self.alpha / mlf.gamma(self.alpha)

    @property
    def prefactor(self) -> float:
        """B(alpha) / (1 - alpha)."""
        return self.b_alpha / (1.0 - self.alpha)

    @property
    def kernel_beta(self) -> float:
        return 1.0 if self.kernel == "standard" else self.alpha

    def kernel_value(self, s: float) -> float:
        """Memory kernel at lag s >= 0."""
        return abc_kernel(self, s)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_n = n*dt on [0, T]."""
    t_final: float
    n_steps: int

    def __post_init__(self):
        if not np.isfinite(self.t_final) or self.t_final <= 0:
            raise DomainError(f"final time must be positive, got {self.t_final}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps}")

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.n_steps + 1)

    @property
    def trapezoid_weights(self) -> np.ndarray:
        weights = np.full(self.n_steps + 1, self.dt)
        weights[0] = weights[-1] = 0.5 * self.dt
        return weights


@dataclass(frozen=True, eq=False)
class AbcWeights:
    """Product-integration weights of the left ABC derivative.

    The discrete derivative at node n is
    ``scale * sum_{j=1..n} moments[n-j] * (u_j - u_{j-1})``; ``moments[k]``
    is the kernel integrated over the k-th subinterval behind t_n. The
    lower-triangular table ``w[n][j]`` follows by summation by parts.
    """
    order: Optional[FractionalOrder]
    grid: TimeGrid
    moments: np.ndarray
    scale: float

    @property
    def classical(self) -> bool:
        return self.order is None

    @property
    def leading(self) -> float:
        """Diagonal weight w[n][n], the same for every n >= 1."""
        return self.scale * self.moments[0]

    def weight(self, n: int, j: int) -> float:
        if n == 0 or j > n:
            return 0.0
        if j == n:
            return self.leading
        if j == 0:
            return -self.scale * self.moments[n - 1]
        return self.scale * (self.moments[n - j] - self.moments[n - j - 1])

    def table(self) -> np.ndarray:
        """Dense (n+1) x (n+1) weight table; meant for small grids."""
        size = self.grid.n_steps + 1
        table = np.zeros((size, size))
        for n in range(1, size):
            for j in range(n + 1):
                table[n, j] = self.weight(n, j)
        return table

    def history(self, n: int, increments: np.ndarray) -> np.ndarray:
        """Memory term scale * sum_{j=1..n-1} moments[n-j] * (u_j - u_{j-1}).

        Args:
            n: Current time node, n >= 1
            increments: Array whose row j-1 holds u_j - u_{j-1}

        Returns:
            Memory contribution with the trailing shape of the increments
        """
        if n <= 1:
            return np.zeros(increments.shape[1:])
        return self.scale * (self.moments[n - 1:0:-1] @ increments[:n - 1])


def abc_kernel(order: FractionalOrder, s: float) -> float:
    """Memory kernel of the selected family at lag s >= 0."""
    if order.kernel == "two_parameter":
        return mlf.mlf_kernel(order, s)
    s = float(s)
    if not s >= 0:
        raise DomainError(f"kernel lag must be nonnegative, got {s}")
    return mlf.mlf_eval(mlf.MlfParams(order.alpha, 1.0), -order.gamma * s ** order.alpha)


def kernel_array(order: FractionalOrder, lags) -> np.ndarray:
    lags = np.asarray(lags, dtype=float)
    return mlf.mlf_array(order.alpha, order.kernel_beta, -order.gamma * lags ** order.alpha)


def _standard_moments(order: FractionalOrder, grid: TimeGrid) -> np.ndarray:
    # int_0^s E_a(-g r^a) dr = s * E_{a,2}(-g s^a)
    s = grid.dt * np.arange(grid.n_steps + 1)
    primitive = s * mlf.mlf_array(order.alpha, 2.0, -order.gamma * s ** order.alpha)
    return np.diff(primitive)


def _first_moment(order: FractionalOrder, dt: float) -> float:
    """Two-parameter kernel integrated over [0, dt].

    With u = s**alpha the integrand becomes E_{alpha,alpha}(-gamma u) u**b / alpha,
    b = 1/alpha - 1, which is analytic in u. The panel [0, min(dt**alpha, 1/gamma)]
    carries the u**b weight in a Gauss-Jacobi rule; the rest of the range is
    covered by panels doubling in length, each resolving the 1/gamma layer.
    """
    alpha, gamma = order.alpha, order.gamma
    power = 1.0 / alpha - 1.0
    top = dt ** alpha
    edge = min(top, 1.0 / gamma)
    nodes, weights = special.roots_jacobi(GAUSS_POINTS, 0.0, power)
    u = 0.5 * edge * (nodes + 1.0)
    total = (0.5 * edge) ** (power + 1.0) * (weights @ mlf.mlf_array(alpha, alpha, -gamma * u))

    points, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    lower = edge
    while lower < top:
        upper = min(2.0 * lower, top)
        half = 0.5 * (upper - lower)
        u = lower + half * (points + 1.0)
        total += half * (weights @ (mlf.mlf_array(alpha, alpha, -gamma * u) * u ** power))
        lower = upper
    return total / alpha


def _gauss_moments(order: FractionalOrder, grid: TimeGrid) -> np.ndarray:
    # away from s = 0 the kernel is analytic on each subinterval
    points, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    half = 0.5 * grid.dt
    left = grid.dt * np.arange(1, grid.n_steps)
    lags = left[:, None] + half * (points[None, :] + 1.0)
    moments = np.empty(grid.n_steps)
    moments[0] = _first_moment(order, grid.dt)
    moments[1:] = half * kernel_array(order, lags) @ weights
    return moments


@lru_cache(maxsize=32)
def build_abc_weights(order: FractionalOrder, grid: TimeGrid) -> AbcWeights:
    """Build (and cache) the ABC weights for an order and time grid.

    Args:
        order: Fractional order and kernel family
        grid: Uniform time grid

    Returns:
        AbcWeights reusable across every spatial degree of freedom
    """
    if order.kernel == "standard":
        moments = _standard_moments(order, grid)
    else:
        moments = _gauss_moments(order, grid)
    moments.setflags(write=False)
    logger.debug("built ABC weights alpha=%g kernel=%s n=%d", order.alpha, order.kernel, grid.n_steps)
    return AbcWeights(order=order, grid=grid, moments=moments, scale=order.prefactor / grid.dt)


def build_backward_euler_weights(grid: TimeGrid) -> AbcWeights:
    """Weights whose derivative reduces to (u_n - u_{n-1}) / dt."""
    moments = np.zeros(grid.n_steps)
    moments[0] = grid.dt
    moments.setflags(write=False)
    return AbcWeights(order=None, grid=grid, moments=moments, scale=1.0 / grid.dt ** 2)


def _check_series(grid: TimeGrid, series) -> np.ndarray:
    series = np.asarray(series, dtype=float)
    if series.ndim not in (1, 2) or series.shape[0] != grid.n_steps + 1:
        raise ShapeError(
            f"time series must have {grid.n_steps + 1} rows, got shape {series.shape}"
        )
    return series


def _causal_convolve(kernel: np.ndarray, data: np.ndarray) -> np.ndarray:
    # out[n-1] = sum_{j=1..n} kernel[n-j] * data[j-1]
    n = kernel.shape[0]
    if data.ndim == 1:
        return np.convolve(kernel, data)[:n]
    return np.column_stack([np.convolve(kernel, column)[:n] for column in data.T])


def apply_abc_left(weights: AbcWeights, series) -> np.ndarray:
    """Left ABC derivative (base point 0) at every time node; node 0 is 0."""
    series = _check_series(weights.grid, series)
    out = np.zeros_like(series)
    out[1:] = weights.scale * _causal_convolve(np.asarray(weights.moments), np.diff(series, axis=0))
    return out


def apply_abc_right(weights: AbcWeights, series) -> np.ndarray:
    """Right ABC derivative (base point T) by time reversal of the left one."""
    series = _check_series(weights.grid, series)
    return apply_abc_left(weights, series[::-1])[::-1]


def abc_integral(order: FractionalOrder, grid: TimeGrid, series) -> np.ndarray:
    """ABC fractional integral of a time series.

    The Riemann-Liouville tail integrates (t - tau)**(alpha - 1) exactly over
    each subinterval against the subinterval mean of the series.
    """
    series = _check_series(grid, series)
    alpha, b_alpha = order.alpha, order.b_alpha
    k = np.arange(grid.n_steps, dtype=float)
    tail_weights = (k + 1.0) ** alpha - k ** alpha
    means = 0.5 * (series[1:] + series[:-1])
    tail = np.zeros_like(series)
    tail[1:] = _causal_convolve(tail_weights, means)
    tail *= grid.dt ** alpha / (b_alpha * mlf.gamma(alpha))
    return (1.0 - alpha) / b_alpha * series + tail
