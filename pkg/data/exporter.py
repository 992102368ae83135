"""CSV and JSON export of run artifacts."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from config.settings import Settings
from solver.fracops import TimeGrid
from solver.mesh import SpaceGrid

logger = logging.getLogger(__name__)

AXES = ("x", "y")


def _coordinate_columns(coords: np.ndarray, repeats: int) -> Dict[str, np.ndarray]:
    return {AXES[d]: np.tile(coords[:, d], repeats) for d in range(coords.shape[1])}


def trajectory_frame(grid: SpaceGrid, time: TimeGrid, values: np.ndarray) -> pd.DataFrame:
    """Long-format frame with columns t, node, x, [y], value.

    Rows are ordered by time node, then node index.
    """
    values = np.asarray(values, dtype=float)
    n_times = time.n_steps + 1
    if values.shape != (n_times, grid.n_nodes):
        raise ValueError(f"trajectory must have shape {(n_times, grid.n_nodes)}, got {values.shape}")
    data = {
        "t": np.repeat(time.nodes, grid.n_nodes),
        "node": np.tile(np.arange(grid.n_nodes), n_times),
    }
    data.update(_coordinate_columns(grid.coords, n_times))
    data["value"] = values.ravel()
    return pd.DataFrame(data)


def control_frame(grid: SpaceGrid, time: TimeGrid, values: np.ndarray) -> pd.DataFrame:
    """Long-format frame with columns t, boundary_index, node, x, [y], beta."""
    values = np.asarray(values, dtype=float)
    n_times = time.n_steps + 1
    if values.shape != (n_times, grid.n_boundary):
        raise ValueError(f"control must have shape {(n_times, grid.n_boundary)}, got {values.shape}")
    data = {
        "t": np.repeat(time.nodes, grid.n_boundary),
        "boundary_index": np.tile(np.arange(grid.n_boundary), n_times),
        "node": np.tile(grid.boundary_nodes, n_times),
    }
    data.update(_coordinate_columns(grid.coords[grid.boundary_nodes], n_times))
    data["beta"] = values.ravel()
    return pd.DataFrame(data)


def trace_frame(report) -> pd.DataFrame:
    """Optimization trace with the documented trace columns."""
    rows = [record.to_dict() for record in report.iterates]
    return pd.DataFrame(rows, columns=Settings.TRACE_COLUMNS)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


class RunExporter:
    """Write every artifact of a run into one output directory."""

    def __init__(self, output_dir: Union[str, Path]):
        self.settings = Settings()
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.output_dir / self.settings.OUTPUT_FILES[key]

    def write_csv(self, df: pd.DataFrame, key: str) -> Path:
        """Write a frame with fixed float formatting so reruns are byte-identical."""
        path = self.path(key)
        df.to_csv(path, index=False, float_format=self.settings.CSV_FLOAT_FORMAT)
        logger.info("wrote %s (%d rows)", path, len(df))
        return path

    def write_state(self, grid: SpaceGrid, time: TimeGrid, u: np.ndarray) -> Path:
        return self.write_csv(trajectory_frame(grid, time, u), "state")

    def write_adjoint(self, grid: SpaceGrid, time: TimeGrid, v: np.ndarray) -> Path:
        return self.write_csv(trajectory_frame(grid, time, v), "adjoint")

    def write_control(self, grid: SpaceGrid, time: TimeGrid, beta: np.ndarray) -> Path:
        return self.write_csv(control_frame(grid, time, beta), "control")

    def write_trace(self, report) -> Path:
        return self.write_csv(trace_frame(report), "trace")

    def write_json(self, payload: Dict[str, Any], key: str) -> Path:
        """Write a versioned JSON document."""
        document = {"schema_version": self.settings.SCHEMA_VERSION}
        document.update(_jsonable(payload))
        path = self.path(key)
        path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info("wrote %s", path)
        return path
