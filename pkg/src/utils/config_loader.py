#!/usr/bin/env python3
"""
Configuration Loader Module

Reads experiment configurations: a flat key = value text file split into
sections, validated into an ExperimentConfig. Defaults for the output
directory, thread count and log level may come from the environment (or a
.env file); the precedence is CLI flag > config file > environment.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.exceptions import ConfigError

logger = logging.getLogger(__name__)

ENV_OUT_DIR = "WEYL_LAB_OUT_DIR"
ENV_THREADS = "WEYL_LAB_THREADS"
ENV_LOG_LEVEL = "WEYL_LAB_LOG_LEVEL"

Experiment = Literal["verify", "norm-sweep", "gevrey-fit", "decomp-check", "compose"]

SECTION_KEYS: Dict[str, List[str]] = {
    "experiment": ["experiment", "h_grid", "s", "C", "schur_k", "seed", "threads", "draws"],
    "weight": ["weight", "perturbation"],
    "basis": ["N"],
    "quadrature": ["M", "R", "y_spacing", "y_reach", "t_M", "t_R"],
    "symbol": ["symbol", "symbol_rate", "bump_r", "route", "symbols", "window", "window_r", "radius_min",
               "radius_max", "radius_count", "spacing", "compose_b_rate", "compose_points"],
    "output": ["out_dir", "log_level"],
}
LIST_KEYS = {"h_grid", "symbols", "compose_points"}


class ExperimentConfig(BaseModel):
    """Every knob of one experiment run. Unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")

    # [experiment]
    experiment: Experiment = "verify"
    h_grid: List[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05])
    s: float = 2.0
    C: float = 50.0
    # O(1) denominator of the Schur kernel growth exponent
    schur_k: float = 3.0
    seed: int = 0
    threads: int = 1
    draws: int = 50

    # [weight]
    weight: Literal["bargmann", "fbi"] = "bargmann"
    perturbation: Literal["zero", "tanh_bump", "sine"] = "tanh_bump"

    # [basis]
    N: int = 12

    # [quadrature]
    M: int = 128
    R: float = 4.0
    # Y grid of the rank-one decomposition: fixed spacing, half-width y_reach * h
    y_spacing: float = 0.02
    y_reach: float = 4.6
    t_M: int = 121
    t_R: float = 6.0

    # [symbol]
    symbol: Literal["gaussian", "bump", "projection", "exp_radius", "oscillator", "cone"] = "gaussian"
    symbol_rate: float = 1.0
    bump_r: float = 1.0
    route: Literal["radial", "superposition", "direct"] = "radial"
    symbols: List[str] = Field(default_factory=lambda: ["bump:2", "bump:3", "gaussian", "cone"])
    window: Literal["gevrey", "gaussian"] = "gevrey"
    # bump radius of the Gevrey window partition
    window_r: float = 2.0
    radius_min: float = 20.0
    radius_max: float = 780.0
    radius_count: int = 60
    spacing: float = 0.002
    compose_b_rate: float = 2.0
    compose_points: List[str] = Field(default_factory=lambda: ["0", "0.3+0.2j", "-0.25+0.4j"])

    # [output]
    out_dir: str = "results"
    log_level: str = "INFO"

    @field_validator("h_grid")
    @classmethod
    def _check_h_grid(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("h_grid must contain at least one value")
        for h in value:
            if not 0.0 < h <= 1.0:
                raise ValueError(f"h values must lie in (0, 1], got {h}")
        return value

    @field_validator("N")
    @classmethod
    def _check_degree(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"basis degree N must be non-negative, got {value}")
        return value

    @field_validator("M", "t_M", "radius_count", "threads", "draws")
    @classmethod
    def _check_positive_int(cls, value: int) -> int:
        if value <= 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    @field_validator("R", "y_spacing", "y_reach", "t_R", "C", "symbol_rate", "bump_r", "spacing", "compose_b_rate",
                     "radius_min", "radius_max", "schur_k", "window_r")
    @classmethod
    def _check_positive_float(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    @field_validator("s")
    @classmethod
    def _check_gevrey_index(cls, value: float) -> float:
        if value <= 1.0:
            raise ValueError(f"Gevrey index s must exceed 1, got {value}")
        return value

    @field_validator("symbols")
    @classmethod
    def _check_symbol_specs(cls, value: List[str]) -> List[str]:
        for entry in value:
            name, _, index = entry.partition(":")
            if name not in ("bump", "gaussian", "exp_radius", "cone"):
                raise ValueError(f"unknown fit symbol '{entry}'")
            if name == "bump":
                float(index)
        return value

    @field_validator("compose_points")
    @classmethod
    def _check_points(cls, value: List[str]) -> List[str]:
        for item in value:
            complex(item.replace(" ", "").replace("i", "j"))
        return value

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        level = value.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level '{value}'")
        return level

    @model_validator(mode="after")
    def _check_radii(self) -> "ExperimentConfig":
        if self.radius_max <= self.radius_min:
            raise ValueError("radius_max must exceed radius_min")
        return self

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy for the provenance block."""
        return self.model_dump()

    @property
    def points(self) -> List[complex]:
        return [_to_complex(item) for item in self.compose_points]


def _split_value(key: str, raw: str) -> Union[str, List[str]]:
    raw = raw.strip()
    if key in LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _to_complex(item: str) -> complex:
    try:
        return complex(item.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot read '{item}' as a complex point") from exc


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """The raw key/value pairs of a sectioned config file; keys must sit in their own section."""
    owner = {key: section for section, keys in SECTION_KEYS.items() for key in keys}
    values: Dict[str, Any] = {}
    section: Optional[str] = None
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in SECTION_KEYS:
                raise ConfigError(f"{source}:{number}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got '{line}'")
        if section is None:
            raise ConfigError(f"{source}:{number}: key outside of any section")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in owner:
            raise ConfigError(f"{source}:{number}: unknown key '{key}'")
        if owner[key] != section:
            raise ConfigError(f"{source}:{number}: key '{key}' belongs in [{owner[key]}], found in [{section}]")
        if key in values:
            raise ConfigError(f"{source}:{number}: duplicate key '{key}'")
        values[key] = _split_value(key, raw)
    return values


def environment_defaults() -> Dict[str, Any]:
    """WEYL_LAB_* variables, after loading a .env file if one exists."""
    load_dotenv()
    defaults: Dict[str, Any] = {}
    if os.getenv(ENV_OUT_DIR):
        defaults["out_dir"] = os.getenv(ENV_OUT_DIR)
    if os.getenv(ENV_THREADS):
        defaults["threads"] = os.getenv(ENV_THREADS)
    if os.getenv(ENV_LOG_LEVEL):
        defaults["log_level"] = os.getenv(ENV_LOG_LEVEL)
    return defaults


def build_config(file_values: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None,
                 use_environment: bool = True) -> ExperimentConfig:
    merged: Dict[str, Any] = environment_defaults() if use_environment else {}
    merged.update(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig(**merged)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors())
        raise ConfigError(f"invalid configuration: {problems}") from exc


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None,
                use_environment: bool = True) -> ExperimentConfig:
    """Config file at `path` (or defaults only) merged with the environment and CLI overrides."""
    file_values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        file_values = parse_config_text(path.read_text(encoding="utf-8"), str(path))
        logger.info(f"Loaded {len(file_values)} keys from {path}")
    return build_config(file_values, overrides, use_environment)
