"""Run configuration parsing, overrides and canonical emission."""
import json
import logging
from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from config.run_config import RunConfig, config_key, nested_type
from data.config_validator import RunConfigValidator
from solver.errors import ConfigError

logger = logging.getLogger(__name__)


def _build(cls, data: Dict[str, Any], path: str, errors: List[str]):
    """Instantiate a config dataclass, collecting unknown keys into errors."""
    if not isinstance(data, dict):
        errors.append(f"{path or 'config'}: expected an object, got {type(data).__name__}")
        return cls()
    known = {config_key(f): f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        errors.append(f"unknown keys in {path or 'config'}: {', '.join(unknown)}")
    kwargs = {}
    for key, f in known.items():
        if key not in data:
            continue
        section = nested_type(f)
        child = f"{path}.{key}" if path else key
        kwargs[f.name] = _build(section, data[key], child, errors) if section else data[key]
    return cls(**kwargs)


def from_dict(data: Dict[str, Any]) -> RunConfig:
    """Build and validate a RunConfig from a parsed document.

    Raises:
        ConfigError: listing unknown keys and every invariant violation
    """
    errors: List[str] = []
    config = _build(RunConfig, data, "", errors)
    if errors:
        raise ConfigError(errors)
    validator = RunConfigValidator()
    is_valid, problems = validator.validate(config)
    for warning in validator.warnings:
        logger.warning(warning)
    if not is_valid:
        raise ConfigError(problems)
    return config


def _read_document(source: Union[str, Path]) -> Dict[str, Any]:
    text = str(source)
    if not text.lstrip().startswith("{"):
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"configuration file not found: {path}")
        text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"configuration is not valid JSON: {str(e)}")


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply dotted ``key=value`` overrides to a parsed document in place.

    Values are read as JSON when possible (numbers, booleans, lists) and
    kept as strings otherwise.
    """
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override {override!r} is not of the form key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.strip().split(".")
        target = data
        for part in parts[:-1]:
            node = target.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {override!r}: {part} is not a section")
            target = node
        target[parts[-1]] = value
    return data


def parse_config(source: Union[str, Path], overrides: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse a JSON run configuration from a file path or literal text.

    Args:
        source: Path to a JSON file, or the JSON text itself
        overrides: Dotted ``key=value`` strings applied before validation

    Returns:
        Validated RunConfig with every default filled
    """
    data = _read_document(source)
    if overrides:
        data = apply_overrides(data, overrides)
    return from_dict(data)


def emit_config(config: RunConfig) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"


def write_resolved(config: RunConfig, output_dir: Union[str, Path], name: str = "resolved.json") -> Path:
    path = Path(output_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_config(config), encoding="utf-8")
    return path
