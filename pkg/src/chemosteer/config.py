"""Run configuration: a single JSON document with canonical hashing.

Every experiment is fully determined by one RunConfig; the canonical JSON
serialization (sorted keys, no whitespace) is hashed so that reports can be
reproduced from their own config echo.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .elliptic import PhysicsParams
from .grid import DomainSpec, GeometryError, TimeGrid, build_beta, build_domain, build_time_grid


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class DomainConfig:
    n_cells: int = 100
    omega_a: float = 0.3
    omega_b: float = 0.7
    x0: float = 0.5


@dataclass
class TimeConfig:
    T: float = 1.0
    n_steps: int = 200


@dataclass
class PhysicsConfig:
    chi: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0


@dataclass
class CarlemanConfig:
    delta0: float = 1.5
    lambda_scale: float = 1.0
    s_scale: float = 1.0
    freeze_after_first: bool = False


@dataclass
class HumConfig:
    epsilon: float = 1e-6
    cg_tol: float = 1e-10
    cg_max_iters: int = 500


@dataclass
class FixedPointConfig:
    tol: float = 1e-6
    max_iters: int = 30
    initial_guess: str = "zero"


@dataclass
class InitialDataConfig:
    shape: str = "cosine"
    amplitude: float = 1e-2
    file_path: str = None


@dataclass
class OutputConfig:
    dir: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])


@dataclass
class RunConfig:
    domain: DomainConfig = field(default_factory=DomainConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    carleman: CarlemanConfig = field(default_factory=CarlemanConfig)
    hum: HumConfig = field(default_factory=HumConfig)
    fixed_point: FixedPointConfig = field(default_factory=FixedPointConfig)
    initial_data: InitialDataConfig = field(default_factory=InitialDataConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


_SECTIONS = {
    "domain": DomainConfig,
    "time": TimeConfig,
    "physics": PhysicsConfig,
    "carleman": CarlemanConfig,
    "hum": HumConfig,
    "fixed_point": FixedPointConfig,
    "initial_data": InitialDataConfig,
    "output": OutputConfig,
}


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a (possibly partial) plain dict."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    kwargs = {}
    for key, cls in _SECTIONS.items():
        section = data.get(key, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section '{key}' must be an object")
        known = set(cls.__dataclass_fields__)
        unknown = set(section) - known
        if unknown:
            raise ConfigError(f"unknown keys in section '{key}': {sorted(unknown)}")
        kwargs[key] = cls(**section)
    extra = set(data) - set(_SECTIONS) - {"seed"}
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    cfg = RunConfig(seed=int(data.get("seed", 0)), **kwargs)
    validate_config(cfg)
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_override(cfg_dict: dict, dotted: str, raw_value: str) -> None:
    """Apply one --set override of the form section.key=value in place."""
    if "=" in dotted:
        raise ConfigError("pass path and value separately")
    parts = dotted.split(".")
    node = cfg_dict
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot descend into '{dotted}'")
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node[parts[-1]] = value


def validate_config(cfg: RunConfig) -> None:
    """Re-run the structural validations of every referenced module."""
    try:
        domain = build_domain(cfg.domain.n_cells,
                              (cfg.domain.omega_a, cfg.domain.omega_b),
                              cfg.domain.x0)
        build_beta(domain)
        build_time_grid(cfg.time.T, cfg.time.n_steps)
        PhysicsParams(chi=cfg.physics.chi, gamma=cfg.physics.gamma,
                      delta=cfg.physics.delta)
    except (GeometryError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not (1.0 < cfg.carleman.delta0 < 2.0):
        raise ConfigError(f"carleman.delta0 must lie in (1, 2), got {cfg.carleman.delta0}")
    if cfg.carleman.lambda_scale <= 0.0 or cfg.carleman.s_scale <= 0.0:
        raise ConfigError("carleman scales must be positive")
    if cfg.hum.epsilon <= 0.0:
        raise ConfigError("hum.epsilon must be positive")
    if cfg.hum.cg_tol <= 0.0 or cfg.hum.cg_max_iters < 1:
        raise ConfigError("invalid CG settings")
    if cfg.fixed_point.tol <= 0.0:
        raise ConfigError("fixed_point.tol must be positive")
    if cfg.fixed_point.max_iters < 0:
        raise ConfigError("fixed_point.max_iters must be nonnegative")
    if cfg.fixed_point.initial_guess not in ("zero", "u0-constant"):
        raise ConfigError(f"unknown initial guess '{cfg.fixed_point.initial_guess}'")
    if cfg.initial_data.shape not in ("cosine", "bump", "file"):
        raise ConfigError(f"unknown initial data shape '{cfg.initial_data.shape}'")
    if cfg.initial_data.shape == "file" and not cfg.initial_data.file_path:
        raise ConfigError("initial_data.file_path required for shape 'file'")
    if cfg.time.n_steps < 4:
        raise ConfigError("time.n_steps must be at least 4")


def build_geometry(cfg: RunConfig):
    """Domain, time grid, profile and physics objects for a validated config."""
    domain = build_domain(cfg.domain.n_cells,
                          (cfg.domain.omega_a, cfg.domain.omega_b),
                          cfg.domain.x0)
    time = build_time_grid(cfg.time.T, cfg.time.n_steps)
    beta = build_beta(domain)
    physics = PhysicsParams(chi=cfg.physics.chi, gamma=cfg.physics.gamma,
                            delta=cfg.physics.delta)
    return domain, time, beta, physics


def initial_data(cfg: RunConfig, domain: DomainSpec) -> np.ndarray:
    """Built-in initial data shapes, or cell values ingested from a file."""
    a = cfg.initial_data.amplitude
    x = domain.centers
    if cfg.initial_data.shape == "cosine":
        return a * (1.0 + np.cos(np.pi * x)) / 2.0
    if cfg.initial_data.shape == "bump":
        return a * np.exp(-100.0 * (x - domain.x0) ** 2)
    values = np.loadtxt(cfg.initial_data.file_path)
    if values.shape != (domain.n_cells,):
        raise ConfigError(
            f"initial data file must hold {domain.n_cells} cell values, "
            f"got shape {values.shape}"
        )
    return a * values
