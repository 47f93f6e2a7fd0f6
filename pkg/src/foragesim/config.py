"""Scenario configuration: schema, validation, flat-file (de)serialization.

The on-disk format is a flat TOML document: one lower_snake_case key per
SimConfig field, no tables. ``world_extent`` is a two-element array of
lengths; every other field is a scalar. Unknown keys are rejected. Floats
are written with ``repr`` so a config round-trips bit-exactly. The field
table in README.md is the normative schema description.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigParseError, ConfigValidationError

BOUNDARY_MODES = ("periodic", "reflective", "clamped")
OVERFLOW_POLICIES = ("strict", "drop_and_count")

UINT64_MAX = 2**64 - 1

# out_dim is fixed: one acceleration input per planar axis.
OUT_DIM = 2


@dataclass(frozen=True)
class SimConfig:
    """Full scenario description.

    ``init_agents`` / ``init_resources`` accept -1 (the default) meaning
    "fill to capacity"; they are resolved to concrete counts at
    construction, so a constructed config always carries effective values.
    ``max_speed = 0`` disables speed clipping.
    """

    dt: float = 0.1
    n_steps: int = 1000
    world_extent: tuple[float, float] = (100.0, 100.0)
    boundary_mode: str = "periodic"
    max_agents: int = 256
    max_resources: int = 64
    init_agents: int = -1
    init_resources: int = -1
    n_neurons: int = 50
    n_rays: int = 8
    ray_max_range: float = 10.0
    epsilon: float = 0.5
    alpha: float = 0.005
    kernel_gain: float = 1.0
    kernel_scale: float = 1.0
    kernel_cutoff: float = 5.0
    harvest_efficiency: float = 1.0
    metabolic_cost: float = 0.05
    move_cost: float = 0.01
    init_energy: float = 5.0
    reproduce_threshold: float = 10.0
    offspring_energy_fraction: float = 0.5
    mutation_std: float = 0.05
    tau: float = 1.0
    policy_gain: float = 1.0
    max_speed: float = 0.0
    seed: int = 0
    overflow_policy: str = "drop_and_count"

    def __post_init__(self):
        for name in _FLOAT_FIELDS:
            v = getattr(self, name)
            if isinstance(v, int) and not isinstance(v, bool):
                object.__setattr__(self, name, float(v))
        ext = self.world_extent
        if isinstance(ext, (list, tuple)) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in ext
        ):
            object.__setattr__(self, "world_extent", tuple(float(v) for v in ext))
        if self.init_agents == -1:
            object.__setattr__(self, "init_agents", self.max_agents)
        if self.init_resources == -1:
            object.__setattr__(self, "init_resources", self.max_resources)
        _validate(self)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["world_extent"] = list(self.world_extent)
        return d

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SimConfig))

_INT_FIELDS = frozenset(
    f.name for f in dataclasses.fields(SimConfig) if f.type == "int"
)
_FLOAT_FIELDS = frozenset(
    f.name for f in dataclasses.fields(SimConfig) if f.type == "float"
)
_STR_FIELDS = frozenset(
    f.name for f in dataclasses.fields(SimConfig) if f.type == "str"
)


def _require(cond: bool, field: str, message: str):
    if not cond:
        raise ConfigValidationError(field, message)


def _finite(x) -> bool:
    return isinstance(x, float) and math.isfinite(x)


def _validate(cfg: SimConfig):
    _require(_finite(cfg.dt) and cfg.dt > 0, "dt", "must be a finite float > 0")
    _require(cfg.n_steps >= 0, "n_steps", "must be >= 0")
    ext = cfg.world_extent
    _require(
        isinstance(ext, tuple) and len(ext) == 2,
        "world_extent",
        "must be a pair [x_extent, y_extent]",
    )
    for v in ext:
        _require(_finite(v) and v > 0, "world_extent", "extents must be finite and > 0")
    _require(
        cfg.boundary_mode in BOUNDARY_MODES,
        "boundary_mode",
        f"must be one of {BOUNDARY_MODES}",
    )
    _require(cfg.max_agents >= 1, "max_agents", "capacity must be >= 1")
    _require(cfg.max_resources >= 1, "max_resources", "capacity must be >= 1")
    _require(
        0 <= cfg.init_agents <= cfg.max_agents,
        "init_agents",
        f"must be in [0, max_agents={cfg.max_agents}]",
    )
    _require(
        0 <= cfg.init_resources <= cfg.max_resources,
        "init_resources",
        f"must be in [0, max_resources={cfg.max_resources}]",
    )
    _require(cfg.n_neurons >= 1, "n_neurons", "must be >= 1")
    _require(cfg.n_rays >= 1, "n_rays", "must be >= 1")
    _require(
        _finite(cfg.ray_max_range) and cfg.ray_max_range > 0,
        "ray_max_range",
        "must be finite and > 0",
    )
    _require(_finite(cfg.epsilon) and cfg.epsilon >= 0, "epsilon", "must be finite and >= 0")
    _require(_finite(cfg.alpha) and cfg.alpha > 0, "alpha", "must be finite and > 0")
    _require(
        _finite(cfg.kernel_gain) and cfg.kernel_gain >= 0,
        "kernel_gain",
        "must be finite and >= 0",
    )
    _require(
        _finite(cfg.kernel_scale) and cfg.kernel_scale > 0,
        "kernel_scale",
        "must be finite and > 0",
    )
    _require(
        _finite(cfg.kernel_cutoff) and cfg.kernel_cutoff >= 0,
        "kernel_cutoff",
        "must be finite and >= 0",
    )
    _require(
        _finite(cfg.harvest_efficiency) and 0 <= cfg.harvest_efficiency <= 1,
        "harvest_efficiency",
        "must be in [0, 1]",
    )
    _require(
        _finite(cfg.metabolic_cost) and cfg.metabolic_cost >= 0,
        "metabolic_cost",
        "must be finite and >= 0",
    )
    _require(_finite(cfg.move_cost) and cfg.move_cost >= 0, "move_cost", "must be finite and >= 0")
    _require(
        _finite(cfg.init_energy) and cfg.init_energy >= 0,
        "init_energy",
        "must be finite and >= 0",
    )
    _require(
        _finite(cfg.reproduce_threshold) and cfg.reproduce_threshold > 0,
        "reproduce_threshold",
        "must be finite and > 0",
    )
    _require(
        _finite(cfg.offspring_energy_fraction) and 0 < cfg.offspring_energy_fraction < 1,
        "offspring_energy_fraction",
        "must be in the open interval (0, 1)",
    )
    _require(
        _finite(cfg.mutation_std) and cfg.mutation_std >= 0,
        "mutation_std",
        "must be finite and >= 0",
    )
    _require(_finite(cfg.tau) and cfg.tau > 0, "tau", "must be finite and > 0")
    _require(
        _finite(cfg.policy_gain) and cfg.policy_gain >= 0,
        "policy_gain",
        "must be finite and >= 0",
    )
    _require(_finite(cfg.max_speed) and cfg.max_speed >= 0, "max_speed", "must be finite and >= 0")
    _require(0 <= cfg.seed <= UINT64_MAX, "seed", "must fit in 64 bits")
    _require(
        cfg.overflow_policy in OVERFLOW_POLICIES,
        "overflow_policy",
        f"must be one of {OVERFLOW_POLICIES}",
    )


def _coerce(key: str, value):
    """Check the TOML value type for `key` and coerce ints to floats where allowed."""
    if key in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValidationError(key, f"expected a number, got {type(value).__name__}")
        return float(value)
    if key in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigValidationError(key, f"expected an integer, got {type(value).__name__}")
        return value
    if key in _STR_FIELDS:
        if not isinstance(value, str):
            raise ConfigValidationError(key, f"expected a string, got {type(value).__name__}")
        return value
    # world_extent is the only structured field
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigValidationError(key, "expected a two-element array")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigValidationError(key, "array entries must be numbers")
        out.append(float(v))
    return tuple(out)


def parse_config(text: str) -> SimConfig:
    """Parse config text; rejects malformed input and unknown keys."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigParseError(f"malformed config: {e}") from e
    kwargs = {}
    for key, value in raw.items():
        if key not in FIELD_NAMES:
            raise ConfigValidationError(key, "unknown key")
        kwargs[key] = _coerce(key, value)
    return SimConfig(**kwargs)


def load_config(path) -> SimConfig:
    """Load and validate a config file."""
    return parse_config(Path(path).read_text())


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return "[" + ", ".join(repr(float(v)) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return json.dumps(value)


def dumps_config(cfg: SimConfig) -> str:
    """Serialize to the flat text format; floats round-trip bit-exactly."""
    lines = [f"{name} = {_format_value(getattr(cfg, name))}" for name in FIELD_NAMES]
    return "\n".join(lines) + "\n"


def save_config(cfg: SimConfig, path):
    Path(path).write_text(dumps_config(cfg))


def config_json(cfg: SimConfig) -> str:
    """Canonical JSON form, used for hashing and checkpoint headers."""
    return json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: SimConfig) -> str:
    return hashlib.sha256(config_json(cfg).encode()).hexdigest()
