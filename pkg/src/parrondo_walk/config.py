"""Run configuration: YAML schema, validation and figure presets.

All angles in configuration files are in degrees. Unknown keys are
rejected. The schema is documented in README.md.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .state import PROPAGATORS

KINDS = ("walks", "ensemble", "optimize")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Base class for configuration problems."""


class UnknownPresetError(ConfigError):
    pass


class MalformedConfigError(ConfigError):
    pass


class ConfigRangeError(ConfigError):
    pass


@dataclass
class CoinConfig:
    alpha_deg: float
    gamma_deg: float
    chi_deg: float


@dataclass
class InitialStateConfig:
    momenta: list = field(default_factory=lambda: [-1, 0, 1])
    phase_sign: int = 1
    coin: list = field(default_factory=lambda: [[1.0, 0.0], [0.0, 1.0]])  # [re, im] per coin state


@dataclass
class WalkConfig:
    k: float = 1.56
    tau: float = 4 * math.pi
    beta: float = 0.0
    propagator: str = "kicked-rotor"
    light_shift: bool = False
    half_width: Any = None


@dataclass
class EnsembleConfig:
    delta_max_deg: list = field(default_factory=lambda: [0.0])
    realizations: int = 1
    sigma_beta: list = field(default_factory=lambda: [0.0])
    beta_samples: int = 1
    chunk_size: int = 1024


@dataclass
class OptimizeConfig:
    vary: str = "A"
    alpha_deg: float = 0.0
    gamma_deg: list = field(default_factory=lambda: [0.0, 360.0, 1.0])  # start, stop, step
    chi_deg: list = field(default_factory=lambda: [0.0, 360.0, 1.0])
    objective: str = "joint"
    require_paradox: bool = True
    refine_top: int = 3
    refine_span_deg: float = 1.0
    refine_step_deg: float = 0.01
    report_top: int = 50


@dataclass
class RunConfig:
    name: str
    kind: str = "walks"
    steps: int = 50
    seed: int = 1
    format: str = "csv"
    walk: WalkConfig = field(default_factory=WalkConfig)
    coins: dict = field(default_factory=dict)
    walks: dict = field(default_factory=dict)
    initial_states: dict = field(default_factory=lambda: {"ratchet": InitialStateConfig()})
    propagators: list = field(default_factory=list)
    ensemble: Any = None
    optimize: Any = None
    description: str = ""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_NESTED = {
    "walk": WalkConfig,
    "ensemble": EnsembleConfig,
    "optimize": OptimizeConfig,
}


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise MalformedConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise MalformedConfigError(f"{where}: unknown field(s) {unknown}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise MalformedConfigError(f"{where}: {exc}") from None


def _number(value, where, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedConfigError(f"{where}: expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        raise MalformedConfigError(f"{where}: expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigRangeError(f"{where}: must be finite")
    return value


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise MalformedConfigError("configuration must be a mapping")
    data = dict(data)
    for key, cls in _NESTED.items():
        if data.get(key) is not None:
            data[key] = _build(cls, data[key], key)
    if "coins" in data:
        if not isinstance(data["coins"], dict):
            raise MalformedConfigError("coins: expected a mapping")
        data["coins"] = {str(k): _build(CoinConfig, v, f"coins.{k}") for k, v in data["coins"].items()}
    if "initial_states" in data:
        if not isinstance(data["initial_states"], dict):
            raise MalformedConfigError("initial_states: expected a mapping")
        data["initial_states"] = {
            str(k): _build(InitialStateConfig, v, f"initial_states.{k}") for k, v in data["initial_states"].items()
        }
    cfg = _build(RunConfig, data, "config")
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if not isinstance(cfg.name, str) or not cfg.name:
        raise MalformedConfigError("name: must be a non-empty string")
    if cfg.kind not in KINDS:
        raise MalformedConfigError(f"kind: must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.format not in FORMATS:
        raise MalformedConfigError(f"format: must be one of {FORMATS}, got {cfg.format!r}")
    if _number(cfg.steps, "steps", integer=True) < 0:
        raise ConfigRangeError("steps: must be >= 0")
    if not 0 <= _number(cfg.seed, "seed", integer=True) < 2**64:
        raise ConfigRangeError("seed: must be a 64-bit unsigned integer")

    w = cfg.walk
    if _number(w.k, "walk.k") < 0:
        raise ConfigRangeError("walk.k: kick strength must be >= 0")
    _number(w.tau, "walk.tau")
    if not 0 <= _number(w.beta, "walk.beta") < 1:
        raise ConfigRangeError("walk.beta: quasimomentum must lie in [0, 1)")
    if w.propagator not in PROPAGATORS:
        raise MalformedConfigError(f"walk.propagator: must be one of {PROPAGATORS}")
    if not isinstance(w.light_shift, bool):
        raise MalformedConfigError("walk.light_shift: expected true/false")
    if w.half_width is not None and _number(w.half_width, "walk.half_width", integer=True) < 2:
        raise ConfigRangeError("walk.half_width: must be >= 2")
    for p in cfg.propagators:
        if p not in PROPAGATORS:
            raise MalformedConfigError(f"propagators: unknown propagator {p!r}")

    for label, coin in cfg.coins.items():
        for name in ("alpha_deg", "gamma_deg", "chi_deg"):
            _number(getattr(coin, name), f"coins.{label}.{name}")
    if cfg.kind != "optimize" and not cfg.walks:
        raise MalformedConfigError("walks: at least one walk pattern is required")
    for label, pattern in cfg.walks.items():
        if not isinstance(pattern, str) or not pattern:
            raise MalformedConfigError(f"walks.{label}: pattern must be a non-empty string such as 'ABB'")
        missing = sorted(set(pattern) - set(cfg.coins))
        if missing and not (cfg.kind == "optimize" and cfg.optimize and set(missing) == {cfg.optimize.vary}):
            raise MalformedConfigError(f"walks.{label}: unknown coin label(s) {missing}")

    if not cfg.initial_states:
        raise MalformedConfigError("initial_states: at least one initial state is required")
    for label, st in cfg.initial_states.items():
        if not isinstance(st.momenta, list) or not st.momenta:
            raise MalformedConfigError(f"initial_states.{label}.momenta: expected a non-empty list")
        for n in st.momenta:
            _number(n, f"initial_states.{label}.momenta", integer=True)
        if st.phase_sign not in (1, -1):
            raise ConfigRangeError(f"initial_states.{label}.phase_sign: must be +1 or -1")
        if (
            not isinstance(st.coin, list)
            or len(st.coin) != 2
            or any(not isinstance(c, list) or len(c) != 2 for c in st.coin)
        ):
            raise MalformedConfigError(f"initial_states.{label}.coin: expected [[re, im], [re, im]]")
        for c in st.coin:
            for x in c:
                _number(x, f"initial_states.{label}.coin")
        if all(x == 0 for c in st.coin for x in c):
            raise ConfigRangeError(f"initial_states.{label}.coin: amplitudes must not both be zero")

    if cfg.kind == "ensemble":
        e = cfg.ensemble
        if e is None:
            raise MalformedConfigError("ensemble: section required for kind 'ensemble'")
        for d in e.delta_max_deg:
            if _number(d, "ensemble.delta_max_deg") < 0:
                raise ConfigRangeError("ensemble.delta_max_deg: noise half-width must be >= 0")
        for s in e.sigma_beta:
            if _number(s, "ensemble.sigma_beta") < 0:
                raise ConfigRangeError("ensemble.sigma_beta: must be >= 0")
        if not e.delta_max_deg or not e.sigma_beta:
            raise MalformedConfigError("ensemble: delta_max_deg and sigma_beta need at least one value")
        if _number(e.realizations, "ensemble.realizations", integer=True) < 1:
            raise ConfigRangeError("ensemble.realizations: must be >= 1")
        if _number(e.beta_samples, "ensemble.beta_samples", integer=True) < 1:
            raise ConfigRangeError("ensemble.beta_samples: must be >= 1")
        if _number(e.chunk_size, "ensemble.chunk_size", integer=True) < 1:
            raise ConfigRangeError("ensemble.chunk_size: must be >= 1")
    if cfg.kind == "optimize":
        o = cfg.optimize
        if o is None:
            raise MalformedConfigError("optimize: section required for kind 'optimize'")
        for axis in ("gamma_deg", "chi_deg"):
            rng = getattr(o, axis)
            if not isinstance(rng, list) or len(rng) != 3:
                raise MalformedConfigError(f"optimize.{axis}: expected [start, stop, step]")
            start, stop, step = (_number(x, f"optimize.{axis}") for x in rng)
            if not (0 <= start < stop <= 360 and step > 0):
                raise ConfigRangeError(f"optimize.{axis}: need 0 <= start < stop <= 360 and step > 0")
        if o.objective not in ("A", "ABB", "joint"):
            raise MalformedConfigError("optimize.objective: must be 'A', 'ABB' or 'joint'")
        if _number(o.refine_top, "optimize.refine_top", integer=True) < 0:
            raise ConfigRangeError("optimize.refine_top: must be >= 0")


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def load_config(source) -> RunConfig:
    """Load a preset by name, a YAML/JSON config file, or a run manifest.

    Raises
    ------
    UnknownPresetError
        ``source`` is neither an existing file nor a preset name.
    MalformedConfigError
        The file cannot be parsed or has the wrong structure.
    ConfigRangeError
        A value is outside its allowed range.
    """
    from .presets import PRESETS

    path = Path(source)
    if isinstance(source, str) and source in PRESETS and not path.exists():
        return config_from_dict(PRESETS[source])
    if not path.is_file():
        raise UnknownPresetError(f"{source!r} is not a file and not a known preset (see list-presets)")
    text = path.read_text()
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise MalformedConfigError(f"{path}: cannot parse: {exc}") from None
    if isinstance(data, dict) and "config" in data and "files" in data:
        data = data["config"]
    return config_from_dict(data)
