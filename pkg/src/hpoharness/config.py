"""Experiment configuration files.

A single YAML document describes one experiment: the task (a surrogate
preset or an external evaluator command), the grid, the HPO space
ladder, algorithms, repetitions, budget ladder, tolerances, and
scheduler/sampler parameters. Unknown keys are rejected so typos fail
loudly. Environment variables may override only the repetition seeds
(HPOHARNESS_SEEDS, comma-separated) and the worker slot count
(HPOHARNESS_SLOTS).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import jsonschema
import yaml

from . import presets
from .engine import ALGORITHMS
from .space import GridSpec, SearchSpace, minimal_space, reduce_space

ENV_SEEDS = "HPOHARNESS_SEEDS"
ENV_SLOTS = "HPOHARNESS_SLOTS"


class ConfigError(ValueError):
    pass


_DOMAIN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["uniform", "loguniform", "categorical", "fixed"]},
        "lo": {"type": "number"},
        "hi": {"type": "number"},
        "values": {"type": "array"},
        "value": {},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment_id", "task"],
    "properties": {
        "experiment_id": {"type": "string", "minLength": 1},
        "task": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["surrogate", "subprocess"]},
                "preset": {"type": "string"},
                "seed": {"type": "integer"},
                "spec": {"type": "object"},
                "command": {"type": "array", "items": {"type": "string"}},
                "epochs": {"type": "integer", "minimum": 1},
                "checkpoints_per_epoch": {"type": "integer", "minimum": 1},
            },
        },
        "model": {"enum": ["electra", "roberta", "custom"]},
        "model_task": {"type": "string"},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["entries", "epochs"],
            "properties": {
                "entries": {
                    "type": "object",
                    "additionalProperties": {"type": "array", "minItems": 1},
                },
                "epochs": {"type": "integer", "minimum": 1},
            },
        },
        "spaces": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["entries"],
                "properties": {
                    "label": {"type": "string"},
                    "entries": {
                        "type": "object",
                        "additionalProperties": _DOMAIN_SCHEMA,
                    },
                    "grid_values": {"type": "object"},
                },
            },
        },
        "algorithms": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": list(ALGORITHMS)},
        },
        "seeds": {"type": "array", "minItems": 1, "items": {"type": "integer"}},
        "budget_ladder": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "number", "exclusiveMinimum": 0},
        },
        "space_mode": {"enum": ["declared", "mining"]},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eps": {"type": "number", "minimum": 0},
                "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "delta": {"type": "number", "minimum": 0},
            },
        },
        "scheduler": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "eta": {"type": "integer", "minimum": 2},
                "grace_period": {"type": "integer", "minimum": 1},
            },
        },
        "sampler": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "n_startup": {"type": "integer", "minimum": 1},
                "n_candidates": {"type": "integer", "minimum": 1},
            },
        },
        "slots": {"type": "integer", "minimum": 1},
    },
}

DEFAULTS: Dict[str, Any] = {
    "algorithms": ["RS"],
    "seeds": [1, 2, 3],
    "budget_ladder": [1.0, 4.0],
    "space_mode": "declared",
    "tolerances": {"eps": 0.05, "theta": 0.9, "delta": 0.25},
    "scheduler": {"eta": 4, "grace_period": 1},
    "sampler": {"gamma": 0.25, "n_startup": 5, "n_candidates": 24},
    "slots": 1,
}


@dataclass
class ExperimentConfig:
    raw: Dict[str, Any]

    @property
    def experiment_id(self) -> str:
        return self.raw["experiment_id"]

    def __getitem__(self, key):
        return self.raw[key]

    def get(self, key, default=None):
        return self.raw.get(key, default)

    # --- resolution helpers -------------------------------------------------

    def grid_spec(self) -> GridSpec:
        if "grid" in self.raw:
            return GridSpec.from_dict(self.raw["grid"])
        model = self.raw.get("model")
        if model == "electra":
            return presets.electra_grid(self.raw.get("model_task", "RTE"))
        if model == "roberta":
            return presets.roberta_grid()
        raise ConfigError("config needs either an explicit 'grid' or a built-in 'model'")

    def space_ladder(self) -> List[SearchSpace]:
        if "spaces" in self.raw:
            return [SearchSpace.from_dict(s) for s in self.raw["spaces"]]
        model = self.raw.get("model")
        if model == "electra":
            return presets.electra_space_ladder(self.raw.get("model_task", "RTE"))
        if model == "roberta":
            return presets.roberta_space_ladder()
        raise ConfigError("config needs either explicit 'spaces' or a built-in 'model'")

    def space_by_label(self, label: str) -> SearchSpace:
        ladder = self.space_ladder()
        for s in ladder:
            if s.label == label:
                return s
        raise ConfigError(
            f"no space labelled {label!r}; known: {[s.label for s in ladder]}"
        )


def _merge_defaults(doc: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(doc)
    for key, value in DEFAULTS.items():
        if key not in merged:
            merged[key] = value
        elif isinstance(value, dict):
            sub = dict(value)
            sub.update(merged[key])
            merged[key] = sub
    return merged


def _apply_env_overrides(doc: Dict[str, Any], env=os.environ) -> Dict[str, Any]:
    if ENV_SEEDS in env:
        try:
            doc["seeds"] = [int(s) for s in env[ENV_SEEDS].split(",") if s.strip()]
        except ValueError:
            raise ConfigError(f"{ENV_SEEDS} must be a comma-separated integer list")
    if ENV_SLOTS in env:
        try:
            doc["slots"] = int(env[ENV_SLOTS])
        except ValueError:
            raise ConfigError(f"{ENV_SLOTS} must be an integer")
    return doc


def validate(doc: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {path}: {exc.message}") from exc
    task = doc["task"]
    if task["kind"] == "surrogate" and not (task.get("preset") or task.get("spec")):
        raise ConfigError("invalid config at task: surrogate task needs 'preset' or 'spec'")
    if task["kind"] == "subprocess" and not task.get("command"):
        raise ConfigError("invalid config at task/command: subprocess task needs a command")


def load_config(path, env=os.environ) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping")
    doc = _apply_env_overrides(_merge_defaults(doc), env=env)
    validate(doc)
    cfg = ExperimentConfig(raw=doc)
    # fail early if the grid/space references cannot be resolved
    if "grid" in doc or "model" in doc:
        grid = cfg.grid_spec()
        for space in cfg.space_ladder():
            for config in grid.configs():
                if not space.contains(config):
                    raise ConfigError(
                        f"grid config {config} not contained in space {space.label!r}"
                    )
    return cfg


def serialize(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.raw, sort_keys=True)


def load_config_str(text: str, env: Optional[dict] = None) -> ExperimentConfig:
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    doc = _apply_env_overrides(_merge_defaults(doc), env=env if env is not None else {})
    validate(doc)
    return ExperimentConfig(raw=doc)
