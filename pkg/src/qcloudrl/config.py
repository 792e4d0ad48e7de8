"""Experiment configuration: one JSON file with documented keys; CLI flags
override file values; unset keys fall back to the shipped defaults
(5 PQC layers, 1500 episodes, lr 0.03/0.05/0.03, decay 0.99, batch 16,
update periods 10/30)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

ALGORITHMS = ("greedy", "reinforce-pqc", "dqn-pqc", "reinforce-mlp", "dqn-mlp")
PQC_ALGORITHMS = ("reinforce-pqc", "dqn-pqc")
POLICY_ALGORITHMS = ("reinforce-pqc", "reinforce-mlp")
OUTDIR_ENV_VAR = "QCLOUDRL_OUTDIR"


@dataclass(frozen=True)
class WorkloadSpec:
    """Task pool source: a manifest file or the synthetic generator."""

    kind: str = "generate"
    path: str | None = None
    n_tasks: int = 200
    seed: int = 11
    width_min: int = 2
    width_max: int = 50
    depth_min: int = 2
    depth_max: int = 17598
    mean_depth: float | None = 400.0
    shots: int = 1024

    def __post_init__(self):
        if self.kind not in ("generate", "manifest"):
            raise ConfigError(f"workload.kind must be 'generate' or 'manifest', got {self.kind!r}")
        if self.kind == "manifest" and not self.path:
            raise ConfigError("workload.kind 'manifest' requires workload.path")
        if self.kind == "generate" and self.n_tasks < 1:
            raise ConfigError(f"workload.n_tasks must be >= 1, got {self.n_tasks}")


@dataclass(frozen=True)
class NoiseSpec:
    amplitude_damping: float = 0.0
    depolarizing: float = 0.0

    def __post_init__(self):
        for name in ("amplitude_damping", "depolarizing"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"noise.{name} must be in [0, 1], got {v}")

    @property
    def enabled(self) -> bool:
        return self.amplitude_damping > 0.0 or self.depolarizing > 0.0


@dataclass(frozen=True)
class AgentSpec:
    """One row of an eval config: algorithm plus checkpoint (greedy needs none)."""

    algorithm: str
    checkpoint: str | None = None
    name: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.algorithm != "greedy" and not self.checkpoint:
            raise ConfigError(f"algorithm {self.algorithm!r} requires a checkpoint path")

    @property
    def label(self) -> str:
        return self.name or self.algorithm


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "reinforce-pqc"
    episodes: int = 1500
    seed: int = 7
    eval_episodes: int = 50
    eval_seed: int = 9001
    pqc_layers: int = 5
    episode_length: int = 10
    interarrival: float = 1.0
    pending_cap: int = 20
    n_nodes: int | None = None
    nodes_path: str | None = None
    gamma: float = 0.99
    lr_phi: float = 0.03
    lr_lambda: float = 0.05
    lr_w: float = 0.03
    lr_mlp: float = 1e-3
    epsilon_start: float = 1.0
    epsilon_min: float = 0.01
    epsilon_decay: float = 0.99
    batch_size: int = 16
    buffer_capacity: int = 10_000
    update_every: int = 10
    target_every: int = 30
    train_ma_window: int = 20
    eval_ma_window: int = 10
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    agents: tuple[AgentSpec, ...] = ()
    outdir: str = "runs"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.episodes < 1:
            raise ConfigError(f"episodes must be >= 1, got {self.episodes}")
        if self.eval_episodes < 1:
            raise ConfigError(f"eval_episodes must be >= 1, got {self.eval_episodes}")
        if self.pqc_layers < 1:
            raise ConfigError(f"pqc_layers must be >= 1, got {self.pqc_layers}")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.n_nodes is not None and self.n_nodes < 1:
            raise ConfigError(f"n_nodes must be >= 1, got {self.n_nodes}")
        for name in ("episode_length", "pending_cap", "batch_size", "buffer_capacity",
                     "update_every", "target_every"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")

    def pqc_lrs(self) -> dict[str, float]:
        return {"phi": self.lr_phi, "lambda": self.lr_lambda, "w": self.lr_w}


# Defaults the noisy command fills in when the config leaves them unset.
NOISY_DEFAULTS = {
    "episodes": 150,
    "pqc_layers": 1,
    "n_nodes": 2,
    "noise": {"amplitude_damping": 0.01, "depolarizing": 0.01},
}

_NESTED_KEYS = {"workload": WorkloadSpec, "noise": NoiseSpec}


def _build_nested(key: str, value):
    cls = _NESTED_KEYS[key]
    if isinstance(value, cls):
        return value
    if not isinstance(value, dict):
        raise ConfigError(f"config key {key!r} must be an object, got {type(value).__name__}")
    valid = {f.name for f in fields(cls)}
    unknown = set(value) - valid
    if unknown:
        raise ConfigError(f"unknown keys under {key!r}: {sorted(unknown)}")
    try:
        return cls(**value)
    except TypeError as exc:
        raise ConfigError(f"bad {key!r} section: {exc}") from exc


def build_config(
    file_values: dict | None = None,
    overrides: dict | None = None,
    command_defaults: dict | None = None,
) -> ExperimentConfig:
    """Merge command defaults < config file < CLI overrides into a config."""
    merged: dict = {}
    for layer in (command_defaults or {}, file_values or {}, overrides or {}):
        for key, value in layer.items():
            if value is None:
                continue
            if key in _NESTED_KEYS and key in merged and isinstance(value, dict):
                base = dict(merged[key]) if isinstance(merged[key], dict) else merged[key]
                if isinstance(base, dict):
                    base.update(value)
                    merged[key] = base
                    continue
            merged[key] = value
    valid = {f.name for f in fields(ExperimentConfig)}
    unknown = set(merged) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in _NESTED_KEYS:
        if key in merged:
            merged[key] = _build_nested(key, merged[key])
    if "agents" in merged:
        specs = []
        for entry in merged["agents"]:
            if isinstance(entry, AgentSpec):
                specs.append(entry)
            elif isinstance(entry, dict):
                specs.append(AgentSpec(**entry))
            else:
                raise ConfigError(f"agent entries must be objects, got {entry!r}")
        merged["agents"] = tuple(specs)
    try:
        return ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return values


def default_outdir() -> str:
    return os.environ.get(OUTDIR_ENV_VAR, "runs")
