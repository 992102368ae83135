"""Conductivity models f(u) with certified bounds."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from solver.errors import ModelError

logger = logging.getLogger(__name__)

SAMPLE_RANGE = 50.0
SAMPLE_COUNT = 2001
DERIVATIVE_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class ConductivityModel:
    """Electrical conductivity f, its derivative and its certified constants.

    Construction samples f on a grid and checks c1 <= f <= c2, the
    Lipschitz bound and the consistency of ``deriv`` with central
    differences; any violation raises ModelError.
    """
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    c1: float
    c2: float
    lipschitz: float
    name: str = "custom"
    sample_range: float = SAMPLE_RANGE
    kinks: Tuple[float, ...] = ()
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ModelError(f"conductivity '{self.name}': " + "; ".join(errors))

    def samples(self) -> np.ndarray:
        return np.linspace(-self.sample_range, self.sample_range, SAMPLE_COUNT)

    def validate(self):
        errors = []
        if not (0 < self.c1 <= self.c2):
            errors.append(f"bounds must satisfy 0 < c1 <= c2, got c1={self.c1}, c2={self.c2}")
            return errors
        if self.lipschitz < 0:
            errors.append(f"Lipschitz constant must be nonnegative, got {self.lipschitz}")

        xi = self.samples()
        values = np.asarray(self.eval(xi), dtype=float)
        slack = 1e-12 * self.c2
        if values.min() < self.c1 - slack or values.max() > self.c2 + slack:
            errors.append(
                f"sampled f in [{values.min():.6g}, {values.max():.6g}] leaves [{self.c1}, {self.c2}]"
            )
        slopes = np.abs(np.diff(values)) / np.diff(xi)
        if slopes.max() > self.lipschitz * (1 + 1e-9) + 1e-12:
            errors.append(f"sampled slope {slopes.max():.6g} exceeds Lipschitz constant {self.lipschitz}")

        step = 1e-5
        smooth = np.ones_like(xi, dtype=bool)
        for kink in self.kinks:
            smooth &= np.abs(xi - kink) > 10 * step
        xi = xi[smooth]
        central = (np.asarray(self.eval(xi + step)) - np.asarray(self.eval(xi - step))) / (2 * step)
        exact = np.asarray(self.deriv(xi), dtype=float)
        mismatch = np.max(np.abs(central - exact) / np.maximum(np.abs(exact), 1.0))
        if mismatch > DERIVATIVE_RTOL:
            errors.append(f"derivative disagrees with central differences (max rel {mismatch:.3g})")
        return errors

    def check_values(self, values: np.ndarray) -> None:
        slack = 1e-12 * self.c2
        if values.min() < self.c1 - slack or values.max() > self.c2 + slack:
            raise ModelError(
                f"conductivity '{self.name}' produced values outside [{self.c1}, {self.c2}]"
            )


def reference_model() -> ConductivityModel:
    """f(u) = 2 + 1/(1 + u^2)."""
    return ConductivityModel(
        eval=lambda u: 2.0 + 1.0 / (1.0 + np.square(u)),
        deriv=lambda u: -2.0 * u / np.square(1.0 + np.square(u)),
        c1=2.0,
        c2=3.0,
        lipschitz=3.0 * math.sqrt(3.0) / 8.0,
        name="reference",
    )


def constant_model(value: float = 1.0) -> ConductivityModel:
    return ConductivityModel(
        eval=lambda u: np.full(np.shape(u), float(value)),
        deriv=lambda u: np.zeros(np.shape(u)),
        c1=float(value),
        c2=float(value),
        lipschitz=0.0,
        name="constant",
        metadata={"value": float(value)},
    )


def sine_model() -> ConductivityModel:
    """f(u) = 2 + sin(u)."""
    return ConductivityModel(
        eval=lambda u: 2.0 + np.sin(u),
        deriv=np.cos,
        c1=1.0,
        c2=3.0,
        lipschitz=1.0,
        name="sine",
    )


def tabulated_model(points: Sequence[float], values: Sequence[float]) -> ConductivityModel:
    """Clamped cubic spline through samples, held constant outside the table.

    Zero end slopes make the constant extension continuously differentiable.
    """
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if points.ndim != 1 or points.shape != values.shape or points.size < 2:
        raise ModelError("tabulated conductivity needs matching 1D points and values (>= 2)")
    if np.any(np.diff(points) <= 0):
        raise ModelError("tabulated conductivity points must be strictly increasing")
    spline = CubicSpline(points, values, bc_type="clamped")
    slope = spline.derivative()
    lo, hi = points[0], points[-1]

    def evaluate(u):
        return spline(np.clip(u, lo, hi))

    def derivative(u):
        u = np.asarray(u, dtype=float)
        return np.where((u < lo) | (u > hi), 0.0, slope(np.clip(u, lo, hi)))

    fine = np.linspace(lo, hi, 20001)
    sampled = spline(fine)
    return ConductivityModel(
        eval=evaluate,
        deriv=derivative,
        c1=float(sampled.min()) * (1 - 1e-9),
        c2=float(sampled.max()) * (1 + 1e-9),
        lipschitz=float(np.abs(slope(fine)).max()) * (1 + 1e-6),
        name="tabulated",
        sample_range=max(SAMPLE_RANGE, abs(lo), abs(hi)),
        kinks=(float(lo), float(hi)),
        metadata={"points": points.tolist(), "values": values.tolist()},
    )


PRESETS: Dict[str, Callable[..., ConductivityModel]] = {
    "reference": reference_model,
    "constant": constant_model,
    "sine": sine_model,
}


def build_model(preset: str, value: Optional[float] = None,
                points: Optional[Sequence[float]] = None,
                values: Optional[Sequence[float]] = None) -> ConductivityModel:
    """Build a conductivity model from a preset name or tabulated samples."""
    if preset == "tabulated":
        return tabulated_model(points or [], values or [])
    if preset not in PRESETS:
        raise ModelError(f"unknown conductivity preset {preset!r}; choose from {sorted(PRESETS) + ['tabulated']}")
    if preset == "constant":
        return constant_model(1.0 if value is None else value)
    return PRESETS[preset]()
