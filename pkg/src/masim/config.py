"""Experiment configuration: a flat TOML document of typed scalars and lists.

Grammar (a subset of TOML): one ``key = value`` per line, ``#`` comments,
values are integers, floats, booleans, double-quoted strings, or
single-line homogeneous arrays of those. Tables are rejected. Every key is
optional; unknown keys are an error.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exceptions import ConfigError

EXPERIMENTS = ("field-map", "sweep-region", "sweep-paths", "power-ratio", "cdf",
               "correlation", "period", "bounds")
SCHEMES = ("AS", "DBF", "FPA", "MA")
GEOMETRIES = ("linear-x", "square")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run.

    Lengths are in wavelengths. ``snr_ratio`` is p_t sigma2 / delta2, the
    average receive SNR of a fixed antenna. Baseline array sizes of 0 mean
    "span the region" (floor(2A + 1) elements, squared for the square grid).
    """

    experiment: str = "sweep-region"
    l_r: int = 2
    sigma2: float = 1.0
    snr_ratio: float = 1.0
    region_side: float = 10.0
    grid_step: float = 0.05
    n_realizations: int = 1000
    seed: int = 0
    schemes: tuple[str, ...] = SCHEMES
    as_m: int = 0
    dbf_m: int = 0
    geometry: str = "linear-x"
    region_sizes: tuple[float, ...] = tuple(float(a) for a in range(1, 17))
    path_counts: tuple[int, ...] = tuple(range(1, 9))
    power_ratios: tuple[float, ...] = (2.0, 10.0, 100.0)
    t_values: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256, 512)
    distances: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0)
    p: int = 8
    t_points: int = 400
    t_max: float = 0.0
    amplitudes: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    phi: tuple[float, ...] = ()
    max_cells: int = 10**8

    def replace(self, **changes) -> "ExperimentConfig":
        return validate(dataclasses.replace(self, **changes))

    def to_dict(self) -> dict[str, Any]:
        return {f.name: (list(v) if isinstance(v, tuple) else v)
                for f in dataclasses.fields(self) for v in [getattr(self, f.name)]}


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_DEFAULT = ExperimentConfig()


def _kind(name: str):
    default = getattr(_DEFAULT, name)
    if isinstance(default, tuple):
        hint = _FIELDS[name].type
        return "list", ("int" if "int" in hint else "float" if "float" in hint else "str")
    return "scalar", type(default).__name__


def _coerce(name: str, value: Any, elem: str):
    if elem == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(name, f"expected an integer, got {value!r}")
        return int(value)
    if elem == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(name, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(name, f"expected a finite number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(name, f"expected a string, got {value!r}")
    return value


def from_mapping(data: dict[str, Any]) -> ExperimentConfig:
    """Build a validated config from a flat mapping, applying defaults."""
    values = {}
    for key, raw in data.items():
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        shape, elem = _kind(key)
        if shape == "list":
            if not isinstance(raw, (list, tuple)):
                raise ConfigError(key, f"expected a list, got {raw!r}")
            values[key] = tuple(_coerce(f"{key}[{i}]", v, elem) for i, v in enumerate(raw))
        else:
            values[key] = _coerce(key, raw, elem)
    return validate(ExperimentConfig(**values))


def _positive(cfg, *names):
    for n in names:
        if not getattr(cfg, n) > 0:
            raise ConfigError(n, f"must be positive, got {getattr(cfg, n)}")


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}, got {cfg.experiment!r}")
    _positive(cfg, "l_r", "sigma2", "snr_ratio", "region_side", "grid_step",
              "n_realizations", "p", "t_points", "max_cells")
    for n in ("as_m", "dbf_m", "seed"):
        if getattr(cfg, n) < 0:
            raise ConfigError(n, "must be nonnegative")
    if cfg.seed >= 2**64:
        raise ConfigError("seed", "must fit in 64 bits")
    if cfg.t_max < 0:
        raise ConfigError("t_max", "must be nonnegative (0 selects 5 sigma2 L)")
    if cfg.geometry not in GEOMETRIES:
        raise ConfigError("geometry", f"must be one of {GEOMETRIES}")
    for i, s in enumerate(cfg.schemes):
        if s not in SCHEMES:
            raise ConfigError(f"schemes[{i}]", f"must be one of {SCHEMES}, got {s!r}")
    for name in ("region_sizes", "path_counts", "power_ratios", "t_values"):
        seq = getattr(cfg, name)
        if not seq:
            raise ConfigError(name, "must not be empty")
        for i, v in enumerate(seq):
            if not v > 0:
                raise ConfigError(f"{name}[{i}]", f"must be positive, got {v}")
    for i, t in enumerate(cfg.t_values):
        if t < 2:
            raise ConfigError(f"t_values[{i}]", "quantization resolution must be >= 2")
    for i, d in enumerate(cfg.distances):
        if d < 0:
            raise ConfigError(f"distances[{i}]", "must be nonnegative")
    lens = {len(cfg.amplitudes), len(cfg.phases), len(cfg.theta), len(cfg.phi)}
    if len(lens) != 1:
        raise ConfigError("amplitudes", "amplitudes, phases, theta and phi must have equal length")
    for name in ("theta", "phi"):
        for i, a in enumerate(getattr(cfg, name)):
            if abs(a) > math.pi / 2 + 1e-12:
                raise ConfigError(f"{name}[{i}]", "angle must lie in [-pi/2, pi/2]")
    for i, a in enumerate(cfg.amplitudes):
        if a < 0:
            raise ConfigError(f"amplitudes[{i}]", "must be nonnegative")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat TOML document into a validated :class:`ExperimentConfig`."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("", f"syntax error: {exc}") from exc
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(key, "tables are not allowed; the document must be flat")
    return from_mapping(data)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config`: every field, one line each."""
    return "".join(f"{k} = {_toml_value(v)}\n" for k, v in cfg.to_dict().items())


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a TOML config, or the ``config`` echo inside a ``.meta.json`` file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"syntax error: {exc}") from exc
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError("", "JSON config must be an object")
        return from_mapping(data)
    return parse_config(text)
