"""Numerical core: special functions, fractional operators, grids and solvers."""
