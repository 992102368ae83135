"""Run configuration models."""
from dataclasses import MISSING, dataclass, field, fields, is_dataclass
from typing import Any, Dict, List, Optional

from config.settings import Settings


@dataclass
class GridConfig:
    """Spatial grid: one entry per axis."""
    extents: List[float] = field(default_factory=lambda: [1.0])
    n_cells: List[int] = field(default_factory=lambda: [32])


@dataclass
class TimeConfig:
    t_final: float = 1.0
    n_steps: int = 128


@dataclass
class ConductivityConfig:
    """Named preset, or ``tabulated`` with points/values."""
    preset: str = "reference"
    value: Optional[float] = None
    points: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)


@dataclass
class InitialConfig:
    """Initial temperature u0 = value + amplitude * shape(x)."""
    kind: str = "constant"
    value: float = 0.0
    amplitude: float = 1.0


@dataclass
class ControlConfig:
    """Box [lower, upper] and initial constant control (midpoint when unset)."""
    lower: float = 0.1
    upper: float = 2.0
    initial: Optional[float] = None

    def initial_value(self) -> float:
        return 0.5 * (self.lower + self.upper) if self.initial is None else self.initial


@dataclass
class SolverConfig:
    picard_tol: float = Settings.PICARD_TOL
    max_picard: int = Settings.MAX_PICARD


@dataclass
class OptimizerConfig:
    max_iters: int = 200
    tol_opt: float = Settings.TOL_OPT
    initial_step: float = Settings.ARMIJO_STEP
    shrink: float = Settings.ARMIJO_SHRINK
    armijo_c: float = Settings.ARMIJO_C
    max_backtracks: int = Settings.MAX_BACKTRACKS
    relaxation: float = Settings.FBS_RELAXATION
    divergence_patience: int = 5
    starts: int = 3

    @property
    def tol_kkt(self) -> float:
        return 10.0 * self.tol_opt


@dataclass
class VerifyConfig:
    level: str = "quick"


@dataclass
class RunConfig:
    """Complete, resolved description of one batch run."""
    mode: str = "simulate"
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    alpha: float = 0.5
    kernel: str = "standard"
    lam: float = field(default=1.0, metadata={"key": "lambda"})
    conductivity: ConductivityConfig = field(default_factory=ConductivityConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output_dir: Optional[str] = None
    seed: int = 0
    classical: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary keyed by document keys."""
        return to_dict(self)


def config_key(f) -> str:
    return f.metadata.get("key", f.name)


def nested_type(f):
    """Dataclass type of a nested section, or None for plain values."""
    factory = f.default_factory
    if factory is not MISSING and isinstance(factory, type) and is_dataclass(factory):
        return factory
    return None


def to_dict(obj) -> Dict[str, Any]:
    data = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        data[config_key(f)] = to_dict(value) if is_dataclass(value) else value
    return data
