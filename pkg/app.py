"""Command-line entry point for thermistor simulation, Robin control and verification.

Usage:
    python app.py <mode> [--config PATH] [--out DIR] [--seed N] [--classical]
                  [--level quick|full] [--verbose] [key=value ...]
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from components.charts import ChartGenerator
from config.run_config import RunConfig
from config.settings import RuntimeConfig, Settings
from data.config_loader import parse_config, write_resolved
from data.exporter import RunExporter, trace_frame
from optimization.cost import evaluate_cost
from optimization.descent import minimize
from optimization.multi_start import multi_start
from optimization.problem import ControlProblem
from optimization.report import OptimizationReport
from optimization.sweep import forward_backward_sweep
from solver.errors import ConfigError, SolverError, ThermistorError
from solver.state import StateTrajectory
from utils.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def configure_logging(level: str) -> None:
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(Settings.LOG_FORMAT))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="ABC-fractional nonlocal thermistor solver with Robin boundary control"
    )
    parser.add_argument("mode", choices=Settings.MODES, help="Run mode")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON run configuration (defaults when omitted)")
    parser.add_argument("--out", type=str, default=None, dest="out_dir",
                        help="Output directory (overrides output_dir)")
    parser.add_argument("--seed", type=int, default=None,
                        help="Seed for randomized checks and multi-start")
    parser.add_argument("--classical", action="store_true",
                        help="Use the backward-Euler time derivative (alpha = 1)")
    parser.add_argument("--level", choices=Settings.VERIFY_LEVELS, default=None,
                        help="Verification level for verify mode")
    parser.add_argument("--verbose", action="store_true", help="Log at INFO level")
    parser.add_argument("overrides", nargs="*", metavar="key=value",
                        help="Dotted config overrides, e.g. time.n_steps=512")
    return parser


def cli_overrides(args: argparse.Namespace) -> List[str]:
    """Command-line flags expressed as config overrides, applied last."""
    overrides = list(args.overrides)
    overrides.append(f"mode={args.mode}")
    if args.out_dir is not None:
        overrides.append(f'output_dir="{Path(args.out_dir).as_posix()}"')
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.classical:
        overrides.append("classical=true")
    if args.level is not None:
        overrides.append(f"verify.level={args.level}")
    return overrides


def problem_summary(config: RunConfig, problem: ControlProblem) -> Dict[str, Any]:
    return {
        "mode": config.mode,
        "grid": {"dim": problem.grid.dim, "n_cells": list(problem.grid.n_cells),
                 "n_nodes": problem.grid.n_nodes, "n_boundary": problem.grid.n_boundary},
        "time": {"t_final": problem.time.t_final, "n_steps": problem.time.n_steps},
        "alpha": None if config.classical else config.alpha,
        "kernel": None if config.classical else config.kernel,
        "classical": config.classical,
        "lambda": problem.lam,
        "conductivity": problem.model.name,
        "tolerances": {"picard_tol": problem.picard_tol, "max_picard": problem.max_picard},
    }


def state_summary(state: StateTrajectory) -> Dict[str, Any]:
    return {
        "picard_iterations_max": max(state.picard_iterations, default=0),
        "picard_iterations_total": int(sum(state.picard_iterations)),
        "contraction_max": max(state.contraction, default=0.0),
        "energy": state.energy,
    }


def write_charts(output_dir: Path, problem: ControlProblem, state: StateTrajectory,
                 beta: np.ndarray, report: Optional[OptimizationReport] = None) -> None:
    charts = ChartGenerator()
    files = Settings.CHART_FILES
    charts.write(charts.state_slices_chart(problem.grid, problem.time, state.u), output_dir / files["state"])
    charts.write(charts.control_chart(problem.grid, problem.time, beta), output_dir / files["control"])
    if report is not None:
        charts.write(charts.trace_chart(trace_frame(report)), output_dir / files["trace"])


def simulate(config: RunConfig, exporter: RunExporter, runtime: RuntimeConfig) -> int:
    problem = ControlProblem.from_config(config)
    beta = np.full((problem.n_times, problem.grid.n_boundary), config.control.initial_value())
    state = problem.solve(beta)
    cost = evaluate_cost(state, beta, problem.grid, problem.time)

    print(f"✓ State solved ({problem.time.n_steps} steps, {problem.grid.n_nodes} nodes)")
    exporter.write_state(problem.grid, problem.time, state.u)
    exporter.write_control(problem.grid, problem.time, beta)
    summary = problem_summary(config, problem)
    summary.update({"state": state_summary(state), "cost": cost.to_dict()})
    exporter.write_json(summary, "summary")
    if runtime.write_charts:
        write_charts(exporter.output_dir, problem, state, beta)
    return EXIT_OK


def optimize(config: RunConfig, exporter: RunExporter, runtime: RuntimeConfig) -> int:
    problem = ControlProblem.from_config(config)
    start = problem.constant_control(config.control.initial_value())
    if config.mode == "fbs":
        report = forward_backward_sweep(problem, start, config.optimizer)
    else:
        report = minimize(problem, start, config.optimizer)

    print(f"✓ {report.method.value}: J = {report.final_cost:.10g} after "
          f"{len(report.iterates) - 1} iterations ({report.message})")
    exporter.write_state(problem.grid, problem.time, report.state.u)
    exporter.write_adjoint(problem.grid, problem.time, report.adjoint.v)
    exporter.write_control(problem.grid, problem.time, report.beta.values)
    exporter.write_trace(report)
    summary = problem_summary(config, problem)
    summary.update({"state": state_summary(report.state), "optimization": report.to_dict()})
    if config.mode == "optimize" and config.optimizer.starts > 1:
        starts = multi_start(problem, config.optimizer, seed=config.seed)
        summary["multi_start"] = starts.to_dict()
    exporter.write_json(summary, "summary")
    if runtime.write_charts:
        write_charts(exporter.output_dir, problem, report.state, report.beta.values, report)
    return EXIT_OK if report.converged else EXIT_CHECK_FAILED


def verify(config: RunConfig, exporter: RunExporter, runtime: RuntimeConfig) -> int:
    report = run_verification(config, config.verify.level)
    exporter.write_json(report, "verify")
    failed = [check["name"] for check in report["checks"] if not check["passed"]]
    print(f"✓ Verification ({config.verify.level}): "
          f"{len(report['checks']) - len(failed)}/{len(report['checks'])} checks passed")
    for name in failed:
        print(f"  ✗ {name}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


MODES = {"simulate": simulate, "optimize": optimize, "fbs": optimize, "verify": verify}


def error_payload(error: Exception) -> Dict[str, Any]:
    payload = {"type": type(error).__name__, "message": str(error)}
    if isinstance(error, SolverError):
        payload["residual_history"] = error.residual_history
    if isinstance(error, ConfigError):
        payload["messages"] = error.messages
    return payload


def run(config: RunConfig, runtime: Optional[RuntimeConfig] = None) -> int:
    """Run one mode, writing every artifact into the output directory.

    Args:
        config: Validated run configuration
        runtime: Process configuration (environment defaults when omitted)

    Returns:
        Exit status: 0 success, 1 failed checks or unconverged optimizer,
        2 solver or configuration error (with error.json written)
    """
    runtime = runtime or Settings.get_runtime_config()
    output_dir = Path(config.output_dir or runtime.output_dir)
    exporter = RunExporter(output_dir)
    write_resolved(config, output_dir, Settings.OUTPUT_FILES["resolved"])
    try:
        return MODES[config.mode](config, exporter, runtime)
    except ThermistorError as e:
        logger.error("%s: %s", type(e).__name__, str(e))
        exporter.write_json(error_payload(e), "error")
        print(f"✗ {type(e).__name__}: {str(e)}", file=sys.stderr)
        return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    runtime = Settings.get_runtime_config()
    configure_logging("INFO" if args.verbose else runtime.log_level)
    try:
        config = parse_config(args.config or "{}", cli_overrides(args))
    except ConfigError as e:
        for message in e.messages:
            print(f"✗ {message}", file=sys.stderr)
        output_dir = Path(args.out_dir or runtime.output_dir)
        RunExporter(output_dir).write_json(error_payload(e), "error")
        return EXIT_ERROR
    return run(config, runtime)


if __name__ == "__main__":
    sys.exit(main())
