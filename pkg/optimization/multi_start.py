"""Independent random starts for the projected gradient optimizer."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config.run_config import OptimizerConfig
from optimization.descent import minimize
from optimization.problem import ControlProblem
from optimization.report import OptimizationReport

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class MultiStartReport:
    """Final costs reached from several admissible constant starts.

    Agreement of the costs is reported, not guaranteed.
    """
    starts: List[float] = field(default_factory=list)
    reports: List[OptimizationReport] = field(default_factory=list)

    @property
    def costs(self) -> List[float]:
        return [report.final_cost for report in self.reports]

    @property
    def best(self) -> OptimizationReport:
        return min(self.reports, key=lambda report: report.final_cost)

    @property
    def relative_spread(self) -> float:
        costs = np.asarray(self.costs)
        return float((costs.max() - costs.min()) / max(abs(costs.min()), np.finfo(float).tiny))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "starts": self.starts,
            "costs": self.costs,
            "converged": [report.converged for report in self.reports],
            "relative_spread": self.relative_spread,
        }


def multi_start(problem: ControlProblem, options: Optional[OptimizerConfig] = None,
                n_starts: Optional[int] = None, seed: int = 0) -> MultiStartReport:
    """Run ``minimize`` from seeded random constants drawn in [lower, upper]."""
    options = options or OptimizerConfig()
    n_starts = n_starts or options.starts
    rng = np.random.default_rng(seed)
    report = MultiStartReport()
    for value in rng.uniform(problem.lower, problem.upper, size=n_starts):
        run = minimize(problem, problem.constant_control(float(value)), options)
        report.starts.append(float(value))
        report.reports.append(run)
        logger.info("start beta=%.4f -> J=%.12g (%s)", value, run.final_cost, run.message)
    logger.info("multi-start relative cost spread %.3e", report.relative_spread)
    return report
