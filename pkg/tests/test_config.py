"""Tests for run configuration parsing and validation."""
import json
from pathlib import Path

import pytest

from config.run_config import RunConfig
from config.settings import Settings
from data.config_loader import apply_overrides, emit_config, parse_config, write_resolved
from data.config_validator import RunConfigValidator
from solver.errors import ConfigError


def test_empty_document_gives_defaults():
    config = parse_config("{}")
    assert config == RunConfig()
    assert config.control.initial_value() == pytest.approx(1.05)
    assert config.optimizer.tol_kkt == pytest.approx(10 * Settings.TOL_OPT)


def test_lambda_uses_document_key():
    config = parse_config('{"lambda": 2.5}')
    assert config.lam == 2.5
    data = config.to_dict()
    assert data["lambda"] == 2.5 and "lam" not in data


def test_emitted_config_reparses_to_same_text():
    config = parse_config('{"mode": "optimize", "grid": {"extents": [1.0, 2.0], "n_cells": [8, 8]}, "alpha": 0.7}')
    text = emit_config(config)
    assert emit_config(parse_config(text)) == text
    assert text.endswith("\n")
    assert json.loads(text)["grid"]["n_cells"] == [8, 8]


def test_reads_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"time": {"n_steps": 64}}), encoding="utf-8")
    assert parse_config(str(path)).time.n_steps == 64


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("does/not/exist.json")


def test_invalid_json():
    with pytest.raises(ConfigError, match="valid JSON"):
        parse_config('{"alpha": }')


def test_unknown_keys_are_listed():
    with pytest.raises(ConfigError) as info:
        parse_config('{"grid": {"extent": [1.0]}, "beta": 1}')
    messages = info.value.messages
    assert "unknown keys in config: beta" in messages
    assert "unknown keys in grid: extent" in messages


def test_alpha_one_points_to_classical_mode():
    with pytest.raises(ConfigError) as info:
        parse_config('{"alpha": 1.0}')
    assert "classical" in str(info.value)


def test_classical_mode_accepts_any_alpha():
    config = parse_config('{"alpha": 1.0, "classical": true}')
    assert config.classical


def test_zero_lower_bound_rejected():
    with pytest.raises(ConfigError, match="0 < m <= beta"):
        parse_config('{"control": {"lower": 0.0}}')


def test_upper_below_lower_rejected():
    with pytest.raises(ConfigError, match="m <= M"):
        parse_config('{"control": {"lower": 1.0, "upper": 0.5}}')


def test_simulate_accepts_insulated_boundary():
    config = parse_config('{"mode": "simulate", "control": {"initial": 0.0}}')
    assert config.control.initial_value() == 0.0


def test_optimize_requires_admissible_start():
    with pytest.raises(ConfigError, match="outside"):
        parse_config('{"mode": "optimize", "control": {"initial": 0.0}}')


def test_collects_every_violation():
    with pytest.raises(ConfigError) as info:
        parse_config('{"alpha": -1, "lambda": -2, "grid": {"n_cells": [2]}, "optimizer": {"relaxation": 2}}')
    assert len(info.value.messages) == 4


class TestOverrides:
    def test_dotted_keys_and_types(self):
        config = parse_config("{}", ["time.n_steps=512", "lambda=0.5", "kernel=two_parameter",
                                     "grid.extents=[1.0, 1.0]", "grid.n_cells=[8, 8]"])
        assert config.time.n_steps == 512
        assert config.lam == 0.5
        assert config.kernel == "two_parameter"
        assert config.grid.n_cells == [8, 8]

    def test_overrides_win_over_document(self):
        assert parse_config('{"seed": 3}', ["seed=9"]).seed == 9

    def test_malformed_override(self):
        with pytest.raises(ConfigError, match="key=value"):
            apply_overrides({}, ["seed"])

    def test_override_through_plain_value(self):
        with pytest.raises(ConfigError, match="not a section"):
            apply_overrides({"alpha": 0.5}, ["alpha.value=1"])


def test_write_resolved(tmp_path):
    config = parse_config('{"seed": 4}')
    path = write_resolved(config, tmp_path / "out")
    assert path.name == "resolved.json"
    assert parse_config(str(path)) == config


def test_validator_report():
    config = RunConfig()
    config.time.n_steps = 8
    validator = RunConfigValidator()
    is_valid, errors = validator.validate(config)
    assert is_valid and errors == []
    report = validator.get_validation_report()
    assert report["warning_count"] == 1
    assert "coarse" in report["warnings"][0]


@pytest.mark.parametrize("name", ["reference.json", "square_tabulated.json"])
def test_shipped_configs_parse(name):
    config = parse_config(str(Path(__file__).resolve().parent.parent / "configs" / name))
    assert config.mode in Settings.MODES
