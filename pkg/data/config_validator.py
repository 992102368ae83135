"""Run configuration validation."""
import math
from typing import Any, Dict, List, Tuple

from config.run_config import RunConfig
from config.settings import Settings
from solver.conductivity import PRESETS
from solver.fracops import ALPHA_MAX, KERNELS
from solver.mesh import MIN_CELLS


def _positive(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value) and value > 0


def _count(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


class RunConfigValidator:
    """Validate a run configuration and collect every violation."""

    def __init__(self):
        self.settings = Settings()
        self.errors = []
        self.warnings = []

    def validate(self, config: RunConfig) -> Tuple[bool, List[str]]:
        """Validate all sections of a run configuration.

        Args:
            config: Configuration with defaults already filled

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        self.errors = []
        self.warnings = []

        if config.mode not in self.settings.MODES:
            self.errors.append(f"mode: {config.mode!r} is not one of {self.settings.MODES}")
        self._check_order(config)
        self._check_grid(config)
        self._check_time(config)
        self._check_physics(config)
        self._check_control(config)
        self._check_solver(config)
        self._check_optimizer(config)
        if config.verify.level not in self.settings.VERIFY_LEVELS:
            self.errors.append(f"verify.level: {config.verify.level!r} is not one of {self.settings.VERIFY_LEVELS}")
        if not isinstance(config.seed, int) or isinstance(config.seed, bool) or config.seed < 0:
            self.errors.append(f"seed: must be a nonnegative integer, got {config.seed!r}")

        return len(self.errors) == 0, self.errors

    def _check_order(self, config: RunConfig) -> None:
        alpha = config.alpha
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool) or not math.isfinite(alpha):
            self.errors.append(f"alpha: must be a number, got {alpha!r}")
        elif config.classical:
            self.warnings.append("classical mode: alpha and kernel are ignored")
        elif alpha >= 1.0:
            self.errors.append(
                f"alpha: {alpha} is not below 1; the ordinary derivative is available "
                "through classical mode (--classical or classical: true)"
            )
        elif not 0.0 < alpha <= ALPHA_MAX:
            self.errors.append(f"alpha: must lie in (0, {ALPHA_MAX}], got {alpha}")
        if config.kernel not in KERNELS:
            self.errors.append(f"kernel: {config.kernel!r} is not one of {list(KERNELS)}")

    def _check_grid(self, config: RunConfig) -> None:
        extents, n_cells = config.grid.extents, config.grid.n_cells
        if not isinstance(extents, list) or not isinstance(n_cells, list):
            self.errors.append("grid: extents and n_cells must be lists")
            return
        if len(extents) not in (1, 2) or len(extents) != len(n_cells):
            self.errors.append(
                f"grid: need 1 or 2 axes with matching extents and n_cells, got {extents} / {n_cells}"
            )
        for extent in extents:
            if not _positive(extent):
                self.errors.append(f"grid.extents: {extent!r} must be positive")
        for cells in n_cells:
            if not _count(cells) or cells < MIN_CELLS:
                self.errors.append(f"grid.n_cells: {cells!r} must be an integer >= {MIN_CELLS}")

    def _check_time(self, config: RunConfig) -> None:
        if not _positive(config.time.t_final):
            self.errors.append(f"time.t_final: {config.time.t_final!r} must be positive")
        if not _count(config.time.n_steps):
            self.errors.append(f"time.n_steps: {config.time.n_steps!r} must be a positive integer")
        elif config.time.n_steps < 16:
            self.warnings.append(f"time.n_steps = {config.time.n_steps} is very coarse")

    def _check_physics(self, config: RunConfig) -> None:
        lam = config.lam
        if not isinstance(lam, (int, float)) or isinstance(lam, bool) or not math.isfinite(lam) or lam < 0:
            self.errors.append(f"lambda: must be a nonnegative number, got {lam!r}")

        conductivity = config.conductivity
        names = sorted(PRESETS) + ["tabulated"]
        if conductivity.preset not in names:
            self.errors.append(f"conductivity.preset: {conductivity.preset!r} is not one of {names}")
        if conductivity.preset == "constant" and conductivity.value is not None and not _positive(conductivity.value):
            self.errors.append(f"conductivity.value: {conductivity.value!r} must be positive")
        if conductivity.preset == "tabulated":
            points, values = conductivity.points, conductivity.values
            if len(points) < 2 or len(points) != len(values):
                self.errors.append("conductivity: tabulated preset needs matching points/values (at least 2)")
            elif any(not _positive(v) for v in values):
                self.errors.append("conductivity.values: tabulated conductivity must be positive")

        initial = config.initial
        if initial.kind not in self.settings.INITIAL_KINDS:
            self.errors.append(f"initial.kind: {initial.kind!r} is not one of {self.settings.INITIAL_KINDS}")

    def _check_control(self, config: RunConfig) -> None:
        control = config.control
        if not _positive(control.lower):
            self.errors.append(f"control.lower: m = {control.lower!r} violates 0 < m <= beta")
            return
        if not _positive(control.upper) or control.upper < control.lower:
            self.errors.append(
                f"control.upper: M = {control.upper!r} must satisfy m <= M (m = {control.lower})"
            )
            return
        initial = control.initial
        if initial is None or control.lower <= initial <= control.upper:
            return
        # simulate runs may use any nonnegative coefficient, including Neumann (0)
        if config.mode == "simulate" and isinstance(initial, (int, float)) and initial >= 0:
            self.warnings.append(
                f"control.initial = {initial} lies outside [{control.lower}, {control.upper}]; "
                "allowed for simulate only"
            )
        else:
            self.errors.append(
                f"control.initial: {initial} lies outside [{control.lower}, {control.upper}]"
            )

    def _check_solver(self, config: RunConfig) -> None:
        if not _positive(config.solver.picard_tol):
            self.errors.append(f"solver.picard_tol: {config.solver.picard_tol!r} must be positive")
        if not _count(config.solver.max_picard):
            self.errors.append(f"solver.max_picard: {config.solver.max_picard!r} must be a positive integer")

    def _check_optimizer(self, config: RunConfig) -> None:
        opt = config.optimizer
        if not _positive(opt.relaxation) or opt.relaxation > 1.0:
            self.errors.append(f"optimizer.relaxation: omega = {opt.relaxation!r} must lie in (0, 1]")
        for name in ("tol_opt", "initial_step"):
            if not _positive(getattr(opt, name)):
                self.errors.append(f"optimizer.{name}: {getattr(opt, name)!r} must be positive")
        for name in ("shrink", "armijo_c"):
            value = getattr(opt, name)
            if not _positive(value) or value >= 1.0:
                self.errors.append(f"optimizer.{name}: {value!r} must lie in (0, 1)")
        for name in ("max_iters", "max_backtracks", "divergence_patience", "starts"):
            if not _count(getattr(opt, name)):
                self.errors.append(f"optimizer.{name}: {getattr(opt, name)!r} must be a positive integer")

    def get_validation_report(self) -> Dict[str, Any]:
        """Get validation report with errors and warnings."""
        return {
            'is_valid': len(self.errors) == 0,
            'errors': self.errors,
            'warnings': self.warnings,
            'error_count': len(self.errors),
            'warning_count': len(self.warnings)
        }
