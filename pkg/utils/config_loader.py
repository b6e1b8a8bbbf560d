"""Preset lookup, overrides and schema validation for experiment configs."""

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import jsonschema
import toml

from timechange.errors import ValidationError
from timechange.variance_catalog import VarianceFunction, variance_from_record

SCHEMA_VERSION = "1"
PRESET_DIR_ENV = "TIMECHANGE_PRESET_DIR"
BUNDLED_PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"

EXPERIMENT_KINDS = [
    "graph_dimension",
    "lq_table",
    "fourier_scan",
    "multifractal",
    "holder_indices",
    "energy",
    "fbm_law",
]

VARIANCE_RECORD_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {
            "enum": [
                "identity",
                "power-law",
                "piecewise-linear",
                "cantor-staircase",
                "self-similar-cdf",
                "iterated-cdf",
            ]
        },
        "params": {"type": "object"},
        "domain_end": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["experiment"],
    "properties": {
        "experiment": {
            "type": "object",
            "required": ["kind", "description"],
            "properties": {
                "kind": {"enum": EXPERIMENT_KINDS},
                "description": {"type": "string"},
                "anchor": {"type": "string"},
                "schema_version": {"const": SCHEMA_VERSION},
            },
            "additionalProperties": False,
        },
        "variance": VARIANCE_RECORD_SCHEMA,
        "simulation": {
            "type": "object",
            "properties": {
                "hurst": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "grid_size": {"type": "integer", "minimum": 2},
                "ensemble": {"type": "integer", "minimum": 1},
                "root_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
                "n_jobs": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "estimator": {"type": "object"},
        "checks": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "lower": {"type": "number"},
                    "upper": {"type": "number"},
                    "asserted": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

SIMULATION_DEFAULTS = {"hurst": 0.5, "grid_size": 2**12 + 1, "ensemble": 1, "root_seed": 0, "n_jobs": 1}


class ConfigError(ValidationError):
    """Missing preset file, malformed override or schema violation"""


class UnknownPresetError(ConfigError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment definition; `raw` is the resolved document echoed into reports."""

    preset: str
    kind: str
    description: str
    anchor: str
    hurst: float
    grid_size: int
    ensemble: int
    root_seed: int
    n_jobs: int
    variance: Optional[Dict[str, Any]] = None
    estimator: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    def build_variance(self) -> VarianceFunction:
        if self.variance is None:
            raise ConfigError(f"preset '{self.preset}' has no [variance] table")
        return variance_from_record(self.variance)


def preset_dir() -> Path:
    return Path(os.environ.get(PRESET_DIR_ENV, BUNDLED_PRESET_DIR))


def list_presets() -> List[Tuple[str, str, str]]:
    """(name, kind, description) for every preset file, sorted by name"""
    rows = []
    for path in sorted(preset_dir().glob("*.toml")):
        experiment = toml.load(path).get("experiment", {})
        rows.append((path.stem, experiment.get("kind", "?"), experiment.get("description", "")))
    return rows


def load_preset(name: str) -> Dict[str, Any]:
    path = preset_dir() / f"{name}.toml"
    if not path.is_file():
        available = ", ".join(row[0] for row in list_presets())
        raise UnknownPresetError(f"Unknown preset '{name}'. Available: {available}")
    try:
        return toml.load(path)
    except toml.TomlDecodeError as e:
        raise ConfigError(f"Error reading preset '{name}': {e}") from e


def load_config_file(path) -> Dict[str, Any]:
    try:
        return toml.load(path)
    except (OSError, toml.TomlDecodeError) as e:
        raise ConfigError(f"Error reading config file {path}: {e}") from e


def parse_override(text: str) -> Tuple[List[str], Any]:
    """Split 'a.b.c=value'; the value is read as a TOML literal, else kept as a string."""
    key, sep, value = text.partition("=")
    keys = [k.strip() for k in key.split(".")]
    if not sep or not all(keys):
        raise ConfigError(f"Override '{text}' is not of the form key.path=value")
    try:
        parsed = toml.loads(f"value = {value.strip()}")["value"]
    except (ValueError, IndexError):
        parsed = value.strip()
    return keys, parsed


def apply_overrides(raw: Mapping[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    resolved = copy.deepcopy(dict(raw))
    for text in overrides:
        keys, value = parse_override(text)
        node = resolved
        for key in keys[:-1]:
            child = node.setdefault(key, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Override '{text}' descends into a non-table value at '{key}'")
            node = child
        node[keys[-1]] = value
    return resolved


def _check_grid_size(size: int) -> bool:
    # a power of two, or a power of two plus one
    return size & (size - 1) == 0 or (size - 1) & (size - 2) == 0


def validate(raw: Mapping[str, Any], name: str = "config") -> None:
    try:
        jsonschema.validate(instance=raw, schema=CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        location = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"Invalid {name} at {location}: {e.message}") from e
    grid_size = raw.get("simulation", {}).get("grid_size")
    if grid_size is not None and not _check_grid_size(grid_size):
        raise ConfigError(f"Invalid {name}: grid_size {grid_size} is neither 2^k nor 2^k + 1")


def build_config(raw: Mapping[str, Any], name: str) -> ExperimentConfig:
    validate(raw, name)
    experiment = raw["experiment"]
    simulation = {**SIMULATION_DEFAULTS, **raw.get("simulation", {})}
    return ExperimentConfig(
        preset=name,
        kind=experiment["kind"],
        description=experiment["description"],
        anchor=experiment.get("anchor", ""),
        hurst=float(simulation["hurst"]),
        grid_size=int(simulation["grid_size"]),
        ensemble=int(simulation["ensemble"]),
        root_seed=int(simulation["root_seed"]),
        n_jobs=int(simulation["n_jobs"]),
        variance=copy.deepcopy(raw.get("variance")),
        estimator=copy.deepcopy(raw.get("estimator", {})),
        checks=copy.deepcopy(raw.get("checks", {})),
        raw=copy.deepcopy(dict(raw)),
    )


def resolve_preset(name: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Load a preset by name, apply dotted overrides and validate."""
    return build_config(apply_overrides(load_preset(name), overrides), name)
