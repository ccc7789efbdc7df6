"""Run configuration: a JSON document describing one curve.

Example::

    {
      "schema_version": 1,
      "scenario": "nonmarkov",
      "label": "R500",
      "parameters": {"lam": 1.0, "ratio": 500, "c1": 0.7071067811865476,
                     "initial": {"nu01": 1, "nu02": 0}},
      "grid": {"t_min": 0.0, "t_max": 0.05, "n_points": 1001},
      "outputs": ["dEA", "dEB", "ergotropy", "populations"]
    }

Markov scenarios take ``Omega, Gamma, gamma_c, l1, l2, omega0, omegaL, tau,
step`` plus an ``initial`` of ``{"basis": m}`` (m = 1..4 for ee, eg, ge, gg)
or ``{"c1": .., "alpha_minus": ..}``. Complex amplitudes may be written as
``[re, im]``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ValidationError

SCHEMA_VERSION = 1
SCENARIOS = ("nonmarkov", "markov_single_cell", "markov_two_cell")
OUTPUTS = ("dEA", "dEB", "ergotropy", "populations")

_NONMARKOV_KEYS = {"lam", "ratio", "c1", "initial", "omega0"}
_MARKOV_KEYS = {"Omega", "Gamma", "gamma_c", "l1", "l2", "omega0", "omegaL", "tau", "step", "initial"}


@dataclass
class RunConfig:
    scenario: str
    parameters: dict[str, Any]
    t_min: float
    t_max: float
    n_points: int
    outputs: list[str] = field(default_factory=lambda: list(OUTPUTS))
    label: str = "curve"

    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_points)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "label": self.label,
            "parameters": copy.deepcopy(self.parameters),
            "grid": {"t_min": self.t_min, "t_max": self.t_max, "n_points": self.n_points},
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        if not isinstance(d, dict):
            raise ValidationError("config must be a JSON object")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema_version {version!r}")
        try:
            grid = d["grid"]
            cfg = cls(
                scenario=d["scenario"],
                parameters=copy.deepcopy(d["parameters"]),
                t_min=float(grid["t_min"]),
                t_max=float(grid["t_max"]),
                n_points=grid["n_points"],
                outputs=list(d.get("outputs", OUTPUTS)),
                label=str(d.get("label", "curve")),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed config: missing or bad field {exc}") from exc
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Check the grid and build every physical object once."""
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max)):
            raise ValidationError("grid bounds must be finite")
        if self.t_min < 0:
            raise ValidationError(f"t_min must be >= 0, got {self.t_min!r}")
        if self.t_max < self.t_min:
            raise ValidationError("t_max must be >= t_min")
        if isinstance(self.n_points, bool) or not isinstance(self.n_points, int) or self.n_points < 2:
            raise ValidationError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad or not self.outputs:
            raise ValidationError(f"outputs must be a non-empty subset of {OUTPUTS}, got {self.outputs!r}")
        allowed = _NONMARKOV_KEYS if self.scenario == "nonmarkov" else _MARKOV_KEYS
        unknown = set(self.parameters) - allowed
        if unknown:
            raise ValidationError(f"unknown parameters for {self.scenario}: {sorted(unknown)}")
        # imported here: the runner pulls in this module
        from .runner import build_model

        build_model(self)


def parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValidationError(f"complex values are [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise ValidationError(f"expected a number or [re, im], got {x!r}")


def load_json(path: str | Path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file {str(p)!r} not found")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON ({exc})") from exc


def set_path(d: dict, path: str, value) -> dict:
    """Copy of ``d`` with the dotted ``path`` set to ``value``.

    Intermediate keys must exist; the final key may be new (it is then
    checked by :meth:`RunConfig.validate`).
    """
    out = copy.deepcopy(d)
    keys = path.split(".")
    node = out
    for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
            raise ValidationError(f"parameter path {path!r} does not exist in the config")
        node = node[k]
    if not isinstance(node, dict):
        raise ValidationError(f"parameter path {path!r} does not exist in the config")
    node[keys[-1]] = value
    return out
