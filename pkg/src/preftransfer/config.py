"""Run configuration files.

A run config is a JSON object with sections:

    {
      "env": "twogoal" | "two_peaks" | "point_reacher" | <tabular fixture>,
      "oracle": "emulated" | "human",
      "transfer": { TransferConfig fields, all optional },
      "irl": { IrlFitConfig fields, all optional },
      "seeds": {"master": int, "oracle": int},
      "output_dir": "runs/example"
    }

Unknown keys anywhere are rejected. Every field can be overridden from the
environment with the PREFTRANSFER_ prefix and underscore-joined paths,
e.g. PREFTRANSFER_TRANSFER_EPSILON=0.2 or PREFTRANSFER_SEEDS_MASTER=7.
The fully-resolved config (defaults materialized) is what gets persisted
alongside run artifacts.
"""

import dataclasses
import json
import os

from .continuous import PointReacher, TwoPeaks
from .fixtures import TABULAR_FIXTURES, get_fixture
from .irl import IrlFitConfig
from .transfer import TransferConfig

ENV_PREFIX = "PREFTRANSFER_"

KNOWN_ENVS = tuple(TABULAR_FIXTURES) + ("two_peaks", "point_reacher")


class ConfigError(ValueError):
    """Invalid run config; message carries the offending field path."""


@dataclasses.dataclass
class RunConfig:
    env: str
    oracle: str = "emulated"
    transfer: TransferConfig = dataclasses.field(default_factory=TransferConfig)
    irl: IrlFitConfig = dataclasses.field(default_factory=IrlFitConfig)
    master_seed: int = 0
    oracle_seed: int = 0
    output_dir: str = "runs/out"
    demos: str = None   # optional path to initial demonstrations (JSON lines);
                        # when omitted, B_0 is generated from the basic task

    def make_env(self):
        if self.env == "two_peaks":
            return TwoPeaks()
        if self.env == "point_reacher":
            return PointReacher()
        return get_fixture(self.env)

    def effective_dict(self):
        """Fully-resolved config with every default materialized."""
        return {
            "env": self.env,
            "oracle": self.oracle,
            "transfer": dataclasses.asdict(self.transfer),
            "irl": {k: (list(v) if isinstance(v, tuple) else v)
                    for k, v in dataclasses.asdict(self.irl).items()},
            "seeds": {"master": self.master_seed, "oracle": self.oracle_seed},
            "output_dir": self.output_dir,
            "demos": self.demos,
        }


def _build_section(cls, data, path):
    field_types = {f.name: f.type for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in field_types:
            raise ConfigError(f"{path}.{key}: unknown key")
        if key == "hidden":
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _coerce(raw, like):
    if isinstance(like, bool):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def env_overrides(environ=None):
    """Collect PREFTRANSFER_* overrides as {(section, field) | (field,): raw}."""
    environ = os.environ if environ is None else environ
    out = {}
    for key, value in environ.items():
        if key.startswith(ENV_PREFIX):
            parts = tuple(key[len(ENV_PREFIX):].lower().split("_", 1))
            out[parts] = value
    return out


def _apply_overrides(data, overrides):
    sections = ("transfer", "irl", "seeds")
    for parts, raw in overrides.items():
        if len(parts) == 2 and parts[0] in sections:
            section, field = parts
            data.setdefault(section, {})[field] = raw
        elif len(parts) >= 1:
            data["_".join(parts)] = raw
    return data


def _coerce_section(cls, data, path):
    defaults = cls()
    for key, value in list(data.items()):
        if isinstance(value, str) and hasattr(defaults, key):
            try:
                data[key] = _coerce(value, getattr(defaults, key))
            except ValueError as exc:
                raise ConfigError(f"{path}.{key}: {exc}") from exc
    return data


TOP_LEVEL_KEYS = {"env", "oracle", "transfer", "irl", "seeds", "output_dir", "demos"}


def parse_run_config(data, overrides=None):
    data = dict(data)
    if overrides:
        data = _apply_overrides(data, dict(overrides))
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "env" not in data:
        raise ConfigError("env: required")
    if data["env"] not in KNOWN_ENVS:
        raise ConfigError(f"env: unknown environment {data['env']!r}; "
                          f"choose one of {sorted(KNOWN_ENVS)}")
    oracle = data.get("oracle", "emulated")
    if oracle not in ("emulated", "human"):
        raise ConfigError(f"oracle: must be 'emulated' or 'human', got {oracle!r}")
    seeds = dict(data.get("seeds", {}))
    unknown = set(seeds) - {"master", "oracle"}
    if unknown:
        raise ConfigError(f"seeds: unknown keys {sorted(unknown)}")
    for k in list(seeds):
        if isinstance(seeds[k], str):
            try:
                seeds[k] = int(seeds[k])
            except ValueError as exc:
                raise ConfigError(f"seeds.{k}: {exc}") from exc
    transfer = _build_section(TransferConfig,
                              _coerce_section(TransferConfig, dict(data.get("transfer", {})), "transfer"),
                              "transfer")
    irl = _build_section(IrlFitConfig,
                         _coerce_section(IrlFitConfig, dict(data.get("irl", {})), "irl"),
                         "irl")
    return RunConfig(env=data["env"], oracle=oracle, transfer=transfer, irl=irl,
                     master_seed=int(seeds.get("master", 0)),
                     oracle_seed=int(seeds.get("oracle", 0)),
                     output_dir=str(data.get("output_dir", "runs/out")),
                     demos=data.get("demos"))


def load_run_config(path, environ=None):
    """Read, validate and resolve a config file, applying env overrides."""
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_run_config(data, env_overrides(environ))


def write_effective_config(cfg, path):
    with open(path, "w") as f:
        json.dump(cfg.effective_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
