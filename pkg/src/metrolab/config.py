"""Experiment configuration: a strict, fail-fast YAML schema.

Top-level sections: ``scenario`` (name), ``grids`` (per-scenario named lists),
``tolerances`` (named reals), ``seed`` (integer), ``output`` (directory and
formats). Unknown keys anywhere are errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import yaml

from .errors import ConfigError

_TOP_KEYS = {"scenario", "grids", "tolerances", "seed", "output"}
_OUTPUT_KEYS = {"dir", "formats"}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "."
    formats: tuple = ("csv", "json")

    def with_grids(self, grids: dict) -> "ExperimentConfig":
        return replace(self, grids=grids)


def _require_mapping(obj, where):
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(obj).__name__}")
    return obj


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = _require_mapping(raw, "config")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "scenario" not in raw:
        raise ConfigError("config is missing the 'scenario' key")
    scenario = raw["scenario"]
    if not isinstance(scenario, str):
        raise ConfigError("'scenario' must be a string")
    grids = _require_mapping(raw.get("grids"), "'grids'")
    for key, value in grids.items():
        if not isinstance(value, (list, tuple)) or len(value) == 0:
            raise ConfigError(f"grid {key!r} must be a nonempty list")
        for v in value:
            if not isinstance(v, (int, float)):
                raise ConfigError(f"grid {key!r} holds a non-numeric entry {v!r}")
    tolerances = _require_mapping(raw.get("tolerances"), "'tolerances'")
    for key, value in tolerances.items():
        if not isinstance(value, (int, float)):
            raise ConfigError(f"tolerance {key!r} must be a number")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("'seed' must be an integer")
    output = _require_mapping(raw.get("output"), "'output'")
    unknown = set(output) - _OUTPUT_KEYS
    if unknown:
        raise ConfigError(f"unknown output keys: {sorted(unknown)}")
    out_dir = output.get("dir", ".")
    formats = output.get("formats", ["csv", "json"])
    if not isinstance(formats, (list, tuple)) or not formats:
        raise ConfigError("'output.formats' must be a nonempty list")
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {fmt!r}")
    return ExperimentConfig(scenario=scenario, grids=dict(grids),
                            tolerances=dict(tolerances), seed=seed,
                            output_dir=str(out_dir), formats=tuple(formats))


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(raw)
