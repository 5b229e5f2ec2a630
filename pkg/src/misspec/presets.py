"""Built-in experiment configurations.

Each preset is a complete configuration document: the environment, the
policy and default command settings.  ``preset(name)`` returns a fresh
:class:`ExperimentConfig` so callers may modify it freely.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Mapping

from .env import Environment, load_environment
from .errors import SchemaError, UnknownPreset
from .policy import cyclic_shift_coef, load_policy

DEFAULT_PARAMS: dict[str, Any] = {
    "horizon": 100_000,
    "seeds": [0],
    "record_every": 100,
    "tie_rule": "lexicographic",
    "step": 1e-2,
    "T": 10.0,
    "branches": 8,
    "resolution": 30,
    "eps": 0.1,
}


@dataclass
class ExperimentConfig:
    name: str
    environment: dict
    policy: dict
    params: dict = field(default_factory=dict)
    out: str = "out"

    def env(self) -> Environment:
        return load_environment(self.environment)

    def policy_spec(self):
        return load_policy(self.policy, self.environment["actions"])

    def param(self, key: str):
        return self.params.get(key, DEFAULT_PARAMS.get(key))

    def document(self) -> dict:
        return {"name": self.name, "environment": self.environment, "policy": self.policy,
                "params": self.params, "out": self.out}


def config_from_document(doc: Mapping) -> ExperimentConfig:
    """Accept either a full configuration or a bare environment document.

    A document with ``preset`` starts from that preset and overrides the
    sections it provides.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("configuration must be a table")
    if "preset" in doc:
        base = preset(doc["preset"])
        if "environment" in doc:
            base.environment = dict(doc["environment"])
        if "policy" in doc:
            base.policy = dict(doc["policy"])
        base.params.update(doc.get("params", {}))
        base.out = doc.get("out", base.out)
        return base
    if "environment" in doc:
        return ExperimentConfig(doc.get("name", "custom"), dict(doc["environment"]),
                                dict(doc.get("policy", {"kind": "myopic"})), dict(doc.get("params", {})),
                                doc.get("out", "out"))
    if "actions" in doc:
        env_doc = {k: v for k, v in doc.items() if k not in ("policy", "params", "out", "name")}
        return ExperimentConfig(doc.get("name", "custom"), env_doc, dict(doc.get("policy", {"kind": "myopic"})),
                                dict(doc.get("params", {})), doc.get("out", "out"))
    raise SchemaError("configuration needs 'preset', 'environment' or 'actions'")


def _rps_affine(labels) -> dict:
    c = cyclic_shift_coef(1.0, 2.0)
    return {lab: [0.0, *c[i % 3].tolist()] for i, lab in enumerate(labels)}


def _triangle_truth(labels, rows) -> dict:
    return {"kind": "gaussian", "dim": 3, "means": {lab: list(r) for lab, r in zip(labels, rows)}}


_E = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
_SIMPLEX_GRID = {"family_kind": "gaussian_common_mean", "grid": {"simplex": 3, "n": 30}, "prior": "uniform"}

_PRESETS: dict[str, dict] = {
    "negative-reinforcement": {
        "environment": {
            "actions": ["x1", "x2"],
            "truth": {"kind": "discrete", "support": [0, 1], "pmf": {"x1": [0.25, 0.75], "x2": [0.75, 0.25]}},
            "payoff": {"table": {"x1": [1.0, 0.0], "x2": [0.0, 1.0]}},
            "models": {"family_kind": "bernoulli_common", "grid": {"lo": 0.01, "hi": 0.99, "n": 99},
                       "prior": "uniform"},
        },
        "policy": {"kind": "myopic"},
        "params": {"horizon": 200_000, "seeds": list(range(50)), "sigma0": [1.0, 0.0], "T": 5.0},
    },
    "triangle": {
        "environment": {
            "actions": ["x1", "x2", "x3"],
            "truth": _triangle_truth(["x1", "x2", "x3"], _E),
            "payoff": {"affine": _rps_affine(["x1", "x2", "x3"])},
            "models": _SIMPLEX_GRID,
        },
        "policy": {"kind": "table_simplex", "builtin": "cyclic_shift", "labels": ["x1", "x2", "x3"]},
        "params": {"horizon": 100_000, "seeds": list(range(50)), "sigma0": [0.34, 0.33, 0.33], "T": 30.0},
    },
    "robust-counterexample-base": {
        "environment": {
            "actions": ["x1", "x2", "x3"],
            "truth": _triangle_truth(["x1", "x2", "x3"], _E),
            "payoff": {"affine": {"x1": [0, 0, 0, 0], "x2": [0, 0, 0, 0], "x3": [0, 0, 0, 0]}},
            "models": _SIMPLEX_GRID,
        },
        "policy": {"kind": "table_simplex", "builtin": "spiral", "labels": ["x1", "x2", "x3"]},
        "params": {"sigma0": [2 / 3, 0.0, 1 / 3], "priority": ["x2", "x1", "x3"], "T": 3.0},
    },
    "one-dimensional": {
        "environment": {
            "actions": ["x0", "x1"],
            "truth": {"kind": "gaussian", "dim": 1, "means": {"x0": [0.0], "x1": [1.0]}},
            "payoff": {"affine": {"x0": [0.0, 0.0], "x1": [0.0, 0.0]}},
            "models": {"family_kind": "gaussian_common_mean", "grid": {"lo": 0.0, "hi": 1.0, "n": 101},
                       "prior": "uniform"},
        },
        "policy": {"kind": "table_1d", "breakpoints": [1 / 3, 2 / 3],
                   "interval_actions": [["x0"], ["x1"], ["x0"]]},
        "params": {"horizon": 100_000, "seeds": list(range(50)), "sigma0": [0.5, 0.5], "eps": 0.1},
    },
    "redundant-action": {
        "environment": {
            "actions": ["x1", "x2", "x3", "x3p"],
            "truth": _triangle_truth(["x1", "x2", "x3", "x3p"], (*_E, _E[2])),
            "payoff": {"affine": _rps_affine(["x1", "x2", "x3", "x3p"]) | {
                "x3p": [0.0, *cyclic_shift_coef(1.0, 2.0)[2].tolist()]}},
            "models": _SIMPLEX_GRID,
        },
        "policy": {"kind": "myopic"},
        "params": {"resolution": 24, "sigma0": [0.3, 0.3, 0.2, 0.2]},
    },
    "positively-reinforcing": {
        "environment": {
            "actions": ["x1", "x2", "x3", "x4"],
            "truth": {"kind": "gaussian", "dim": 1,
                      "means": {"x1": [0.25], "x2": [0.3], "x3": [0.4], "x4": [0.8]}},
            "payoff": {"affine": {"x1": [0.0, 0.0], "x2": [-0.2, 1.0], "x3": [-0.65, 2.0], "x4": [-1.25, 3.0]}},
            "models": {"family_kind": "gaussian_common_mean", "grid": {"lo": 0.0, "hi": 1.0, "n": 201},
                       "prior": "uniform"},
        },
        "policy": {"kind": "myopic"},
        "params": {"horizon": 100_000, "seeds": list(range(30)), "sigma0": [0.25, 0.25, 0.25, 0.25],
                   "eps": 0.05},
    },
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> ExperimentConfig:
    try:
        raw = _PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    raw = copy.deepcopy(raw)
    return ExperimentConfig(name, raw["environment"], raw["policy"], raw.get("params", {}), f"out/{name}")
