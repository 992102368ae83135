"""Closed-form solutions used to check the discrete operators and solvers.

All formulas are for the standard (one-parameter) memory kernel, the
kernel whose inverse is the ABC fractional integral.
"""
from typing import Optional

import numpy as np
from scipy import integrate

from solver import mlf
from solver.errors import DomainError, ShapeError
from solver.fracops import FractionalOrder, TimeGrid
from solver.mesh import SpaceGrid, check_field


def _require_standard(order: FractionalOrder) -> None:
    if order.kernel != "standard":
        raise DomainError("closed-form oracles hold for the standard kernel only")


def relaxation_constants(order: FractionalOrder, mu: float):
    """(C_mu, gamma_mu) of the relaxation solution C_mu E_a(-gamma_mu t^a)."""
    b = order.b_alpha
    denominator = b + (1.0 - order.alpha) * mu
    return b / denominator, order.alpha * mu / denominator


def relaxation_solution(order: FractionalOrder, mu: float, t, u0: float = 1.0) -> np.ndarray:
    """Solution of D u = -mu u with u(0) = u0.

    The value at t = 0 is u0; for t > 0 the solution starts from C_mu u0.
    """
    _require_standard(order)
    t = np.asarray(t, dtype=float)
    c_mu, g_mu = relaxation_constants(order, mu)
    values = u0 * c_mu * mlf.mlf_array(order.alpha, 1.0, -g_mu * t ** order.alpha)
    return np.where(t == 0.0, u0, values)


def constant_source_solution(order: FractionalOrder, u0: float, source: float, t) -> np.ndarray:
    """Solution of D u = s: u0 + s ((1 - a)/B + t^a / (B Gamma(a))) for t > 0."""
    t = np.asarray(t, dtype=float)
    b = order.b_alpha
    integral_of_one = (1.0 - order.alpha) / b + t ** order.alpha / (b * mlf.gamma(order.alpha))
    return np.where(t == 0.0, u0, u0 + source * integral_of_one)


def mode_solution(order: FractionalOrder, eigenvalue: float, u0_i: float, f_i: float, t) -> np.ndarray:
    """One eigenmode of D u + lambda_i u = f_i with constant forcing.

    u_i(t) = zeta E_a(-g t^a) + K t^a E_{a,a+1}(-g t^a) with
    D = B + (1-a) lambda_i, zeta = (B u0_i + (1-a) f_i)/D, K = a f_i/D and
    g = a lambda_i/D.
    """
    _require_standard(order)
    t = np.asarray(t, dtype=float)
    alpha, b = order.alpha, order.b_alpha
    denominator = b + (1.0 - alpha) * eigenvalue
    zeta = (b * u0_i + (1.0 - alpha) * f_i) / denominator
    k = alpha * f_i / denominator
    g = alpha * eigenvalue / denominator
    z = -g * t ** alpha
    values = zeta * mlf.mlf_array(alpha, 1.0, z) + k * t ** alpha * mlf.mlf_array(alpha, alpha + 1.0, z)
    return np.where(t == 0.0, u0_i, values)


def neumann_modes(grid: SpaceGrid, n_modes: int):
    """Discrete Neumann eigenpairs cos(k pi x / L) of the 1D node operator."""
    if grid.dim != 1:
        raise ShapeError("eigen expansion is available on 1D grids only")
    n_modes = min(n_modes, grid.n_cells[0] + 1)
    h, length = grid.spacing[0], grid.extents[0]
    x = grid.coords[:, 0]
    k = np.arange(n_modes)
    vectors = np.cos(np.pi * np.outer(k, x) / length)
    eigenvalues = (2.0 - 2.0 * np.cos(np.pi * k * h / length)) / h ** 2
    return eigenvalues, vectors


def eigen_expansion_solution(grid: SpaceGrid, order: FractionalOrder, time: TimeGrid,
                             u0, source, n_modes: int = 8) -> np.ndarray:
    """Semi-discrete solution of D u - Lap u = f (beta = 0) by eigen expansion.

    Args:
        grid: 1D space grid
        order: Fractional order (standard kernel)
        time: Time grid
        u0: Initial nodal field
        source: Time-independent nodal source
        n_modes: Number of Neumann modes kept

    Returns:
        Trajectory (n_steps + 1, n_nodes); exact in space when the data lie
        in the span of the kept modes
    """
    u0 = check_field(grid, u0)
    source = check_field(grid, source)
    eigenvalues, vectors = neumann_modes(grid, n_modes)
    w = grid.domain_weights
    norms = vectors ** 2 @ w
    u0_coeffs = vectors @ (w * u0) / norms
    f_coeffs = vectors @ (w * source) / norms
    t = time.nodes
    solution = np.zeros((t.size, grid.n_nodes))
    for lam_i, a_i, f_i, phi in zip(eigenvalues, u0_coeffs, f_coeffs, vectors):
        solution += np.outer(mode_solution(order, lam_i, a_i, f_i, t), phi)
    return solution


def abc_derivative_of_power(order: FractionalOrder, t, p: float) -> np.ndarray:
    """Standard-kernel derivative of t^p: B/(1-a) Gamma(p+1) t^p E_{a,p+1}(-g t^a)."""
    _require_standard(order)
    t = np.asarray(t, dtype=float)
    alpha = order.alpha
    return (order.prefactor * mlf.gamma(p + 1.0) * t ** p
            * mlf.mlf_array(alpha, p + 1.0, -order.gamma * t ** alpha))


def abc_derivative_quadrature(order: FractionalOrder, derivative, t: float,
                              points: Optional[int] = None) -> float:
    """B/(1-a) int_0^t u'(s) K(t - s) ds by adaptive quadrature.

    With ``points`` a midpoint rule on that many subintervals is used
    instead, which serves as a brute-force check of the adaptive value.
    """
    def integrand(s):
        return derivative(s) * order.kernel_value(t - s)

    if points:
        h = t / points
        mids = (np.arange(points) + 0.5) * h
        kernel = mlf.mlf_array(order.alpha, order.kernel_beta, -order.gamma * (t - mids) ** order.alpha)
        return float(order.prefactor * h * np.sum(derivative(mids) * kernel))
    value, _ = integrate.quad(integrand, 0.0, t, epsabs=1e-13, epsrel=1e-12, limit=200)
    return order.prefactor * value
