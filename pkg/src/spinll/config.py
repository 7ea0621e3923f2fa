"""Run configuration files: versioned YAML schema, defaults and guards.

A config is a mapping of sections.  Every key is optional; missing keys take
the defaults below and unknown keys are rejected with their full path::

    schema_version: 1
    mode: exact            # verify-algebra | duality | exact | lattice |
                           # continuum | spectrum | raman-compare | sweep
    chain:    {N, omega0, omega, rabi, J_eff, a, boundary, frame}
    initial:  {kind: bloch | random, theta, phi}
    numerics: {dt, steps, sample_every, seed}
    grid:     {n_points, spacing, boundary, profile: kick | uniform,
               kick_angle, theta, phi}
    raman:    {enabled, mode, cross_term}
    protocol: ring-down settings (see RingdownProtocol)
    sweep:    {J_factors}
    algebra:  {site, component, convention}
    duality:  {E, H}
    io:       {out_dir, input}
"""

from __future__ import annotations

import math
import types
import typing
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from . import semiclassical as sc
from .chain import ChainConfig
from .errors import ConfigError, GuardError
from .exact import MAX_SITES, check_step
from .spectroscopy import RingdownProtocol

SCHEMA_VERSION = 1
MODES = ("verify-algebra", "duality", "exact", "lattice", "continuum", "spectrum",
         "raman-compare", "sweep")


@dataclass(frozen=True)
class InitialState:
    """Product of Bloch states; theta = pi everywhere is the all-beta default."""

    kind: str = "bloch"
    theta: tuple[float, ...] = (math.pi,)
    phi: tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class Numerics:
    dt: float = 0.01
    steps: int = 1000
    sample_every: int = 1
    seed: int = 0


@dataclass(frozen=True)
class GridConfig:
    n_points: int = 64
    spacing: float = 1.0
    boundary: str = "pinned"
    profile: str = "kick"
    kick_angle: float = 0.05
    theta: float = 0.0
    phi: float = 0.0


@dataclass(frozen=True)
class RamanOptions:
    enabled: bool = False
    mode: str = "mutual"
    cross_term: bool = True


@dataclass(frozen=True)
class SweepOptions:
    J_factors: tuple[float, ...] = (1.0, 2.0, 4.0)


@dataclass(frozen=True)
class AlgebraOptions:
    site: int = 2
    component: str = "all"
    convention: str = "single"


@dataclass(frozen=True)
class DualityOptions:
    E: tuple[float, ...] = (0.0, 0.0, 0.0)
    H: tuple[float, ...] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class IOConfig:
    out_dir: str = "out"
    input: str | None = None


# the schema's chain defaults: four sites with exchange on, so every mode runs
DEFAULT_CHAIN = ChainConfig(N=4, J_eff=0.5)


@dataclass(frozen=True)
class RunConfig:
    mode: str = "exact"
    chain: ChainConfig = DEFAULT_CHAIN
    initial: InitialState = InitialState()
    numerics: Numerics = Numerics()
    grid: GridConfig = GridConfig()
    raman: RamanOptions = RamanOptions()
    protocol: RingdownProtocol = RingdownProtocol()
    sweep: SweepOptions = SweepOptions()
    algebra: AlgebraOptions = AlgebraOptions()
    duality: DualityOptions = DualityOptions()
    io: IOConfig = IOConfig()
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        """Plain mapping (lists, not tuples) that :func:`parse_config` accepts."""
        return _plain(asdict(self))

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# schema checking driven by the dataclass annotations

def _coerce(value, hint, path: str):
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(hint)
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], path)
    if origin is tuple:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        item = typing.get_args(hint)[0]
        return tuple(_coerce(v, item, f"{path}[{i}]") for i, v in enumerate(value))
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported schema type {hint!r}")


def _section(cls, default, data, path: str):
    if data is None:
        return default
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {data!r}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown key '{path}.{key}'")
    changes = {k: _coerce(v, hints[k], f"{path}.{k}") for k, v in data.items()}
    try:
        return replace(default, **changes)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def parse_config(data: dict) -> RunConfig:
    """Build a validated :class:`RunConfig` from a plain mapping."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at top level")
    hints = typing.get_type_hints(RunConfig)
    for key in data:
        if key not in hints:
            raise ConfigError(f"unknown key '{key}'")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")
    mode = data.get("mode", "exact")
    if mode not in MODES:
        raise ConfigError(f"mode: must be one of {MODES}, got {mode!r}")
    defaults = RunConfig()
    sections = {name: _section(hints[name], getattr(defaults, name), data.get(name), name)
                for name in hints if name not in ("mode", "schema_version")}
    cfg = RunConfig(mode=mode, schema_version=version, **sections)
    _check_options(cfg)
    return cfg


def _check_options(cfg: RunConfig):
    def one_of(path, value, allowed):
        if value not in allowed:
            raise ConfigError(f"{path}: must be one of {allowed}, got {value!r}")

    one_of("initial.kind", cfg.initial.kind, ("bloch", "random"))
    one_of("grid.boundary", cfg.grid.boundary, sc.BOUNDARIES)
    one_of("grid.profile", cfg.grid.profile, ("kick", "uniform"))
    one_of("raman.mode", cfg.raman.mode, sc.RAMAN_MODES)
    one_of("protocol.window", cfg.protocol.window, ("rect", "hann"))
    one_of("algebra.component", cfg.algebra.component, ("z", "plus", "minus", "all"))
    one_of("algebra.convention", cfg.algebra.convention, ("single", "doubled"))
    if len(cfg.duality.E) != 3 or len(cfg.duality.H) != 3:
        raise ConfigError("duality.E and duality.H need three components each")
    if cfg.numerics.steps < 0 or cfg.numerics.sample_every < 1 or cfg.numerics.dt <= 0:
        raise ConfigError("numerics: need dt > 0, steps >= 0, sample_every >= 1")
    if cfg.grid.n_points < 3 or cfg.grid.spacing <= 0:
        raise ConfigError("grid: need n_points >= 3 and spacing > 0")
    if not cfg.sweep.J_factors:
        raise ConfigError("sweep.J_factors must not be empty")
    n_theta = len(cfg.initial.theta)
    if n_theta not in (1, cfg.chain.N) or len(cfg.initial.phi) not in (1, n_theta, cfg.chain.N):
        raise ConfigError(f"initial.theta/phi need 1 or N={cfg.chain.N} entries")


def check_guards(cfg: RunConfig):
    """Numerical preconditions of the selected mode, checked before any work."""
    mode, chain = cfg.mode, cfg.chain
    if mode == "exact":
        if chain.N > MAX_SITES:
            raise GuardError(f"chain.N = {chain.N} exceeds the dense limit {MAX_SITES}")
        check_step(chain, cfg.numerics.dt)
    elif mode in ("lattice", "continuum"):
        spacing = None if mode == "lattice" else cfg.grid.spacing
        number = sc.stability_number(chain, cfg.numerics.dt, spacing)
        if number > sc.STABILITY_GUARD:
            raise GuardError(
                f"explicit stability guard violated: dt*(|omega0| + rabi + 8 a^2 |J| / dz^2) = "
                f"{number:.4g} > {sc.STABILITY_GUARD}")
    elif mode in ("spectrum", "raman-compare", "sweep"):
        if not 0 < cfg.protocol.guard_fraction <= 1:
            raise GuardError(f"protocol.guard_fraction must lie in (0, 1], got {cfg.protocol.guard_fraction}")
    elif mode == "verify-algebra":
        if not 2 <= cfg.algebra.site <= chain.N - 1:
            raise ConfigError(f"algebra.site {cfg.algebra.site} is not interior for N={chain.N}")


def load_config(path) -> RunConfig:
    """Read, default and validate a YAML run config; guards are checked too."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    cfg = parse_config(data)
    check_guards(cfg)
    return cfg
