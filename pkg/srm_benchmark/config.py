"""
Configuration objects and the flat ``key = value`` config file reader.

A config file looks like::

    # desk-scale SRNet run
    preset = desk
    iterations = 20000
    hidden = 128,64
    learning_rate = 1e-3

Keys are the field names of the dataclasses below. One file may carry keys for several
dataclasses, each object only picks the keys it knows; keys nobody knows are rejected.
"""
import dataclasses
import os
from dataclasses import dataclass, field

from srm_benchmark.errors import ConfigError

WORKERS_ENV = "SRM_WORKERS"

RATE_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass
class ScenarioConfig:
    """
    Attributes:
        cell_count: number of adjacent cells K
        cell_radius: hexagon circumradius in meters
        rho_min, rho_max: cell-edge region bounds in dB
        rate: fixed per-UE rate requirement in bit/s/Hz, or "random"
        rate_grid: the grid random rate requirements are drawn from
        pmax_dbm, sigma2_dbm: BS power cap and noise power
        shadowing_std_db: log-normal shadowing standard deviation
        attempt_cap: rejection-sampling attempts allowed per UE drop
        yield_floor: smallest accepted feasible/attempted ratio
        count: feasible samples per generated dataset
        seed: base seed of the per-draw random streams
    """
    cell_count: int = 3
    cell_radius: float = 250.0
    rho_min: float = 0.0
    rho_max: float = 3.0
    rate: str = "0.1"
    rate_grid: tuple = RATE_GRID
    pmax_dbm: float = 46.0
    sigma2_dbm: float = -92.0
    shadowing_std_db: float = 8.0
    attempt_cap: int = 10**6
    yield_floor: float = 1e-4
    count: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.cell_count <= 7:
            raise ConfigError("cell_count has to be between 2 and 7")
        if self.rho_min > self.rho_max:
            raise ConfigError("rho_min can't exceed rho_max")
        if not 0 < self.yield_floor < 1:
            raise ConfigError("yield_floor has to be in (0, 1)")


@dataclass
class TrainConfig:
    iterations: int = 20000
    batch_size: int = 512
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    hidden: tuple = (128, 64)
    bn_momentum: float = 0.99
    bn_epsilon: float = 1e-5
    seed: int = 0
    log_every: int = 500
    # filled from the training set when left empty
    feature_stats: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.batch_size < 2:
            raise ConfigError("batch_size has to be at least 2 while batch normalization is active")
        if self.iterations < 0:
            raise ConfigError("iterations can't be negative")


@dataclass
class PenaltyConfig:
    mode: str = "additive"
    weight: float = 10.0
    weight_grid: tuple = (0.1, 1.0, 10.0, 100.0)
    fallback: bool = True
    ensemble_size: int = 10
    domain: str = "sinr"
    validation_fraction: float = 0.1

    def __post_init__(self):
        if self.mode not in ("additive", "multiplicative"):
            raise ConfigError(f"unknown penalty mode {self.mode!r}")
        if self.domain not in ("sinr", "rate"):
            raise ConfigError(f"unknown penalty domain {self.domain!r}")
        if self.weight < 0:
            raise ConfigError("penalty weight can't be negative")
        if self.ensemble_size < 1:
            raise ConfigError("ensemble size has to be at least 1")


@dataclass
class LocalOptConfig:
    starts: int = 4
    max_iterations: int = 10**4
    tolerance: float = 1e-8
    armijo: float = 1e-4
    start_attempts: int = 100

    def __post_init__(self):
        if self.starts < 1:
            raise ConfigError("starts has to be at least 1")


PRESETS = {
    "desk": {"hidden": (128, 64), "batch_size": 512, "iterations": 20000},
    "full": {"hidden": (720, 360, 180, 90), "batch_size": 8000, "iterations": 150000},
}

_SECTIONS = (ScenarioConfig, TrainConfig, PenaltyConfig, LocalOptConfig)


def read_config(path):
    """Read a flat key-value file into a dict of raw strings."""
    values = {}
    try:
        with open(path, "r") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise ConfigError(f"can't read config {path}: {e}") from e
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{number}: empty key")
        values[key.replace("-", "_")] = value
    known = {"preset"}
    for section in _SECTIONS:
        known.update(f.name for f in dataclasses.fields(section))
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return values


def _convert(name, raw, default):
    if not isinstance(raw, str):
        return raw
    try:
        if isinstance(default, bool):
            lowered = raw.lower()
            if lowered not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return lowered in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = [s.strip() for s in raw.split(",") if s.strip()]
            kind = type(default[0]) if default else float
            return tuple(kind(s) for s in items)
    except ValueError as e:
        raise ConfigError(f"bad value for {name}: {raw!r}") from e
    return raw


def build(section, values=None, **overrides):
    """
    Build a config dataclass from raw values (as returned by read_config) plus overrides.
    A ``preset`` entry is expanded first so explicit keys win over it.
    """
    values = dict(values or {})
    merged = {}
    preset = values.pop("preset", None)
    if preset is not None and section is TrainConfig:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}, expected one of {sorted(PRESETS)}")
        merged.update(PRESETS[preset])
    defaults = section()
    names = {f.name for f in dataclasses.fields(section)}
    for key, raw in values.items():
        if key in names:
            merged[key] = _convert(key, raw, getattr(defaults, key))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return section(**merged)


def worker_count():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as e:
        raise ConfigError(f"{WORKERS_ENV} has to be an integer, got {raw!r}") from e
    return max(workers, 1)
