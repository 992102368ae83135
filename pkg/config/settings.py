"""Configuration settings for the thermistor control solver."""
import os
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()


@dataclass
class RuntimeConfig:
    """Process-level configuration read from the environment."""
    log_level: str = "WARNING"
    output_dir: str = "runs"
    write_charts: bool = True


class Settings:
    """Application settings."""

    SCHEMA_VERSION = "1.0"
    LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

    MODES = ["simulate", "optimize", "fbs", "verify"]
    INITIAL_KINDS = ["constant", "cosine", "gaussian"]
    VERIFY_LEVELS = ["quick", "full"]

    # Numerical defaults
    PICARD_TOL = 1e-10
    MAX_PICARD = 50
    TOL_OPT = 1e-6
    ARMIJO_STEP = 1.0
    ARMIJO_SHRINK = 0.5
    ARMIJO_C = 1e-4
    MAX_BACKTRACKS = 30
    FBS_RELAXATION = 0.5

    # Output artifacts
    OUTPUT_FILES = {
        "resolved": "resolved.json",
        "state": "state_trajectory.csv",
        "adjoint": "adjoint_trajectory.csv",
        "control": "control.csv",
        "trace": "trace.csv",
        "summary": "summary.json",
        "verify": "verify_report.json",
        "error": "error.json",
    }
    CSV_FLOAT_FORMAT = "%.12e"
    TRACE_COLUMNS = ["iter", "J", "grad_norm", "step", "active_fraction"]
    CHART_FILES = {"state": "state.html", "control": "control.html", "trace": "trace.html"}
    STATE_SLICES = 6

    # Chart colors
    ACCENT_COLORS = {
        "background": "#F8F9FA",
        "surface": "#FFFFFF",
        "text": "#212529",
        "grid": "#E9ECEF",
        "border": "#CED4DA",
    }
    CHART_COLORS = {
        "primary": "#0066CC",
    }
    FONT_SIZE_LABEL = 15
    FONT_SIZE_TITLE = 16
    FONT_FAMILY = "Arial, sans-serif"

    @staticmethod
    def get_runtime_config() -> RuntimeConfig:
        """Load runtime configuration from environment or defaults."""
        return RuntimeConfig(
            log_level=os.getenv("THERMISTOR_LOG_LEVEL", "WARNING").upper(),
            output_dir=os.getenv("THERMISTOR_OUTPUT_DIR", "runs"),
            write_charts=os.getenv("THERMISTOR_WRITE_CHARTS", "true").lower() in ("1", "true", "yes"),
        )


# Global settings instance
settings = Settings()
