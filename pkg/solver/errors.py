"""Error types raised by the solver stack."""
from typing import List, Optional


class ThermistorError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ThermistorError, ValueError):
    """A parameter lies outside its mathematical domain."""


class RangeError(ThermistorError, ValueError):
    """An argument lies outside the certified evaluation range."""


class ShapeError(ThermistorError, ValueError):
    """Array length or shape does not match the grid it belongs to."""


class ConfigError(ThermistorError, ValueError):
    """Invalid run configuration."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages: List[str] = list(messages)
        super().__init__("; ".join(self.messages))


class ModelError(ThermistorError, ValueError):
    """Conductivity model violates its declared bounds."""


class SolverError(ThermistorError, RuntimeError):
    """Iteration failed to converge."""

    def __init__(self, message: str, residual_history: Optional[List[float]] = None):
        super().__init__(message)
        self.residual_history: List[float] = list(residual_history or [])


class NumericsError(ThermistorError, RuntimeError):
    """Singular or failed linear solve."""


class SweepDivergenceError(SolverError):
    """Forward-backward sweep oscillates instead of settling."""
