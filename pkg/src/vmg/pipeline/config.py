"""Pipeline configuration: schema, defaults, profiles, round-trip I/O.

A config file is JSON. Every key is optional; missing keys take the
defaults below, unknown keys are an error naming the offending key. A
top-level "profile" key swaps in one of the tuned hyperparameter rows
(PROFILES) as the new defaults before explicit keys are applied; the
parsed config is always fully resolved, so serializing it writes every
value and round-trips losslessly.
"""

import dataclasses
from dataclasses import dataclass, field

from ..envs import env_names
from ..errors import ConfigError
from ..graph import REWARD_MODES
from ..serialize import canonical_json, read_json, write_json

SCHEMA_VERSION = 1

CHECKPOINT_MODES = ("last", "eval")

# Tuned rows for the domain families the method ships defaults for.
# "maze" doubles as the global default.
PROFILES = {
    "maze": {
        "graph": {"gamma_m": 0.8},
        "plan": {"discount": 0.8, "n_subgoal": 1, "n_search_steps": None},
    },
    "kitchen": {
        "graph": {"gamma_m": 0.5},
        "plan": {"discount": 0.95, "n_subgoal": 2, "n_search_steps": None},
    },
    "pen": {
        "graph": {"gamma_m": 0.3},
        "plan": {"discount": 0.8, "n_subgoal": 2, "n_search_steps": 12},
    },
    "hammer": {
        "graph": {"gamma_m": 1.0},
        "plan": {"discount": 0.8, "n_subgoal": 2, "n_search_steps": 12},
    },
}


def _fail(path, message):
    raise ConfigError(f"{path}: {message}")


def _check_int(value, path, minimum=None, maximum=None, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(path, f"must be <= {maximum}, got {value}")
    return int(value)


def _check_float(value, path, minimum=None, below=None, strict_min=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"must be a number, got {value!r}")
    value = float(value)
    if minimum is not None:
        if strict_min and value <= minimum:
            _fail(path, f"must be > {minimum}, got {value}")
        if not strict_min and value < minimum:
            _fail(path, f"must be >= {minimum}, got {value}")
    if below is not None and value >= below:
        _fail(path, f"must be < {below}, got {value}")
    return value


def _check_bool(value, path):
    if not isinstance(value, bool):
        _fail(path, f"must be true or false, got {value!r}")
    return value


def _check_choice(value, path, choices):
    if value not in choices:
        _fail(path, f"must be one of {sorted(choices)}, got {value!r}")
    return value


def _reject_unknown(d, path, known):
    extra = sorted(set(d) - set(known))
    if extra:
        _fail(path, f"unknown key {extra[0]!r} (known: {sorted(known)})")


def _section(cls, d, path):
    names = [f.name for f in dataclasses.fields(cls)]
    if not isinstance(d, dict):
        _fail(path, f"must be an object, got {d!r}")
    _reject_unknown(d, path, names)
    merged = {f.name: d.get(f.name, f.default) for f in dataclasses.fields(cls)}
    return cls(**merged)


@dataclass(frozen=True)
class DataConfig:
    env: str = "point-umaze"
    path: str = None
    n_transitions: int = 20_000
    seed: int = 0
    noise_sigma: float = 0.6
    chaos_prob: float = 0.75
    detour_prob: float = 0.45
    flip_prob: float = 0.3

    def validate(self, path="data"):
        _check_choice(self.env, f"{path}.env", env_names())
        if self.path is not None and not isinstance(self.path, str):
            _fail(f"{path}.path", f"must be a string or null, got {self.path!r}")
        _check_int(self.n_transitions, f"{path}.n_transitions", minimum=1)
        _check_int(self.seed, f"{path}.seed", minimum=0)
        _check_float(self.noise_sigma, f"{path}.noise_sigma", minimum=0.0)
        for name in ("chaos_prob", "detour_prob", "flip_prob"):
            v = _check_float(getattr(self, name), f"{path}.{name}", minimum=0.0)
            if v > 1.0:
                _fail(f"{path}.{name}", f"must be <= 1.0, got {v}")


@dataclass(frozen=True)
class MetricConfig:
    feature_dim: int = 10
    margin: float = 1.0
    epochs: int = 800
    batch_size: int = 100
    lr: float = 1e-3
    checkpoint_every: int = 50
    steps_per_epoch: int = None

    def validate(self, path="metric"):
        _check_int(self.feature_dim, f"{path}.feature_dim", minimum=1)
        _check_float(self.margin, f"{path}.margin", minimum=0.0, strict_min=True)
        _check_int(self.epochs, f"{path}.epochs", minimum=1)
        # one negative per anchor needs a second batch row
        _check_int(self.batch_size, f"{path}.batch_size", minimum=2)
        _check_float(self.lr, f"{path}.lr", minimum=0.0, strict_min=True)
        _check_int(self.checkpoint_every, f"{path}.checkpoint_every", minimum=1)
        _check_int(self.steps_per_epoch, f"{path}.steps_per_epoch", minimum=1, optional=True)


@dataclass(frozen=True)
class TranslatorConfig:
    k_max: int = 10
    epochs: int = 800
    batch_size: int = 100
    lr: float = 1e-3
    checkpoint_every: int = 50
    steps_per_epoch: int = None

    def validate(self, path="translator"):
        _check_int(self.k_max, f"{path}.k_max", minimum=1)
        _check_int(self.epochs, f"{path}.epochs", minimum=1)
        _check_int(self.batch_size, f"{path}.batch_size", minimum=1)
        _check_float(self.lr, f"{path}.lr", minimum=0.0, strict_min=True)
        _check_int(self.checkpoint_every, f"{path}.checkpoint_every", minimum=1)
        _check_int(self.steps_per_epoch, f"{path}.steps_per_epoch", minimum=1, optional=True)


@dataclass(frozen=True)
class GraphConfig:
    gamma_m: float = 0.8
    reward_mode: str = "avg_with_internal"

    def validate(self, path="graph"):
        if isinstance(self.gamma_m, bool) or not isinstance(self.gamma_m, (int, float)):
            _fail(f"{path}.gamma_m", f"must be a number, got {self.gamma_m!r}")
        if self.gamma_m <= 0:
            _fail(f"{path}.gamma_m", "gamma_m must be > 0")
        _check_choice(self.reward_mode, f"{path}.reward_mode", REWARD_MODES)


@dataclass(frozen=True)
class PlanSection:
    discount: float = 0.8
    n_search_steps: int = None
    n_subgoal: int = 1
    greedy: bool = False

    def validate(self, path="plan"):
        _check_float(self.discount, f"{path}.discount", minimum=0.0, below=1.0)
        _check_int(self.n_search_steps, f"{path}.n_search_steps", minimum=1, optional=True)
        _check_int(self.n_subgoal, f"{path}.n_subgoal", minimum=1)
        _check_bool(self.greedy, f"{path}.greedy")


@dataclass(frozen=True)
class EvalConfig:
    episodes: int = 100
    model_seeds: int = 3
    base_seed: int = 10_000
    selection_episodes: int = 20

    def validate(self, path="eval"):
        _check_int(self.episodes, f"{path}.episodes", minimum=1)
        _check_int(self.model_seeds, f"{path}.model_seeds", minimum=1)
        _check_int(self.base_seed, f"{path}.base_seed", minimum=0)
        _check_int(self.selection_episodes, f"{path}.selection_episodes", minimum=1)


_SECTIONS = {
    "data": DataConfig,
    "metric": MetricConfig,
    "translator": TranslatorConfig,
    "graph": GraphConfig,
    "plan": PlanSection,
    "eval": EvalConfig,
}

_TOP_KEYS = ("schema_version", "profile", "seed", "checkpoint", *_SECTIONS)


@dataclass(frozen=True)
class PipelineConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    checkpoint: str = "last"
    data: DataConfig = field(default_factory=DataConfig)
    metric: MetricConfig = field(default_factory=MetricConfig)
    translator: TranslatorConfig = field(default_factory=TranslatorConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    plan: PlanSection = field(default_factory=PlanSection)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            _fail("schema_version", f"expected {SCHEMA_VERSION}, got {self.schema_version!r}")
        _check_int(self.seed, "seed", minimum=0)
        _check_choice(self.checkpoint, "checkpoint", CHECKPOINT_MODES)
        for name in _SECTIONS:
            getattr(self, name).validate(name)
        return self

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError(f"config root must be an object, got {d!r}")
        _reject_unknown(d, "config", _TOP_KEYS)
        d = dict(d)
        profile = d.pop("profile", None)
        if profile is not None:
            _check_choice(profile, "profile", PROFILES)
            for section, overrides in PROFILES[profile].items():
                d[section] = {**overrides, **d.get(section, {})}
        sections = {}
        for name, section_cls in _SECTIONS.items():
            sections[name] = _section(section_cls, d.get(name, {}), name)
        cfg = cls(
            schema_version=d.get("schema_version", SCHEMA_VERSION),
            seed=d.get("seed", 0),
            checkpoint=d.get("checkpoint", "last"),
            **sections,
        )
        return cfg.validate()

    def to_dict(self):
        out = {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "checkpoint": self.checkpoint,
        }
        for name in _SECTIONS:
            out[name] = dataclasses.asdict(getattr(self, name))
        return out

    def canonical(self):
        return canonical_json(self.to_dict())

    def save(self, path):
        write_json(path, self.to_dict())


def parse_config(path):
    try:
        raw = read_json(path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return PipelineConfig.from_dict(raw)
