"""Scenario configuration: YAML or JSON in, validated dataclasses out.

Every block has defaults, so an empty file is a valid scenario.  Unknown keys
are rejected at any depth, and the whole file is parsed before any
computation starts.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

ENV_VAR = "QUBITFIELD_CONFIG"
STATE_PRESETS = ("maximally-mixed", "product", "bell")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeConfig:
    nt: int = 64
    nx: int = 64
    dt: float = 1 / 128
    dx: float = 1 / 64


@dataclass(frozen=True)
class ModeConfig:
    amplitude: float
    wavenumber: float
    direction: int = 1
    phase: float = 0.0


def _standing_modes() -> tuple:
    k = 2 * np.pi
    return (ModeConfig(0.25, k, 1), ModeConfig(0.25, k, -1))


def _winding_modes() -> tuple:
    return (ModeConfig(0.3, 2 * np.pi, 1),)


@dataclass(frozen=True)
class ScalarConfig:
    modes: tuple = field(default_factory=_standing_modes)
    slope_x: float = 0.0
    slope_t: float = 0.0


@dataclass(frozen=True)
class Tolerances:
    algebra: float = 1e-12
    table: float = 1e-10
    residual: float = 1e-9
    integer: float = 1e-6
    witness: float = 1e-8


@dataclass(frozen=True)
class ClassifyConfig:
    lam: tuple = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    mu: float = 0.0


@dataclass(frozen=True)
class SimulateConfig:
    steps: int = 200
    mu: float = 0.0
    csv: str | None = None
    refinements: int = 3
    crossings: float = 2.0
    # null right-mover with unit winding: nonzero conserved charge
    scalar: ScalarConfig = field(
        default_factory=lambda: ScalarConfig(_winding_modes(), slope_x=2.0, slope_t=-2.0)
    )


@dataclass(frozen=True)
class DiagnoseConfig:
    preset: str = "maximally-mixed"
    bloch: tuple = (0.0, 0.0, 1.0)
    snapshot: str | None = None
    sites: tuple | None = None  # default: every site of slice nt // 2
    reference_site: tuple | None = None  # default: first probed site


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    dim: int = 4
    fixture: str | None = None
    samples: int = 20
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    scalar: ScalarConfig = field(default_factory=ScalarConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    classify: ClassifyConfig = field(default_factory=ClassifyConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    diagnose: DiagnoseConfig = field(default_factory=DiagnoseConfig)

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


_NESTED = {
    "lattice": LatticeConfig,
    "scalar": ScalarConfig,
    "tolerances": Tolerances,
    "classify": ClassifyConfig,
    "simulate": SimulateConfig,
    "diagnose": DiagnoseConfig,
}
_INT_FIELDS = {"seed", "dim", "samples", "nt", "nx", "steps", "refinements", "direction"}
_TUPLE_FIELDS = {"lam", "bloch", "sites", "reference_site"}


def _build(cls, data: Any, where: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'}: expected a mapping, got {type(data).__name__}")
    types = {f.name: f.type for f in dataclasses.fields(cls)}
    names = set(types)
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where or 'config'}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for key, value in data.items():
        path = f"{where}.{key}" if where else key
        if key in _NESTED:
            kwargs[key] = _build(_NESTED[key], value, path)
        elif key == "modes":
            if not isinstance(value, list):
                raise ConfigError(f"{path}: expected a list of modes")
            kwargs[key] = tuple(_build(ModeConfig, m, f"{path}[{i}]") for i, m in enumerate(value))
        elif key in _TUPLE_FIELDS and value is not None:
            kwargs[key] = _as_tuple(value, path)
        elif key in _INT_FIELDS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}: expected an integer")
            kwargs[key] = value
        elif types[key] == "float":
            kwargs[key] = _as_float(value, path)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where or 'config'}: {exc}") from None


def _as_float(value, path) -> float:
    # YAML 1.1 reads "1e-12" (no decimal point) as a string
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None


def _as_tuple(value, path):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list")
    return tuple(_as_tuple(v, path) if isinstance(v, (list, tuple)) else v for v in value)


def parse_config(data: dict | None) -> ScenarioConfig:
    cfg = _build(ScenarioConfig, data or {}, "")
    _validate(cfg)
    return cfg


def read_config_data(path) -> dict:
    """Raw mapping from a YAML (or JSON) file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML/JSON: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return data


def load_config(path) -> ScenarioConfig:
    return parse_config(read_config_data(path))


def _validate(cfg: ScenarioConfig) -> None:
    if cfg.dim < 2 or cfg.dim % 2:
        raise ConfigError("dim must be an even integer >= 2")
    lat = cfg.lattice
    if lat.nt < 4 or lat.nx < 4:
        raise ConfigError("lattice needs at least 4 points in each direction")
    if not (lat.dt > 0 and lat.dx > 0):
        raise ConfigError("lattice spacings must be positive")
    for name, tol in dataclasses.asdict(cfg.tolerances).items():
        if not (isinstance(tol, (int, float)) and tol > 0):
            raise ConfigError(f"tolerances.{name} must be a positive number")
    if len(cfg.classify.lam) != 6:
        raise ConfigError("classify.lam needs six coefficients")
    if cfg.simulate.steps < 0:
        raise ConfigError("simulate.steps must be non-negative")
    if cfg.simulate.refinements < 0:
        raise ConfigError("simulate.refinements must be non-negative")
    if len(cfg.diagnose.bloch) != 3:
        raise ConfigError("diagnose.bloch needs three components")
    if cfg.diagnose.preset not in STATE_PRESETS:
        raise ConfigError(
            f"unknown state preset {cfg.diagnose.preset!r} (choose from {', '.join(STATE_PRESETS)})"
        )
