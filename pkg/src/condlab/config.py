"""Strict TOML configuration for the experiment runner.

A config file names one experiment, optional `seed` and `output_dir`, and one
table of parameters for that experiment::

    experiment = "sphere"
    seed = 2

    [sphere]
    geometry = "wedge"
    domain = "half_meridian"
    half_width = 0.01

Unknown keys anywhere are rejected before any computation starts, and every
numeric field is validated against the owning module's preconditions; error
messages name the offending field and the violated constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError

EXPERIMENTS = ("sphere", "formulations", "reparam", "map_demo", "evidence_demo", "hierarchy")

_REQUIRED = object()


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    output_dir: str | None
    seed: int
    params: dict[str, Any]


def _number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return float(value)


def _integer(key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _string(key: str, value, choices: tuple[str, ...] | None = None) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    if choices is not None and value not in choices:
        allowed = ", ".join(repr(c) for c in choices)
        raise ConfigError(f"{key}: must be one of {allowed}")
    return value


def _number_list(key: str, value, length: int | None = None) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of numbers")
    out = [_number(f"{key}[{i}]", v) for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ConfigError(f"{key}: expected exactly {length} numbers")
    return out


def _positive(key: str, value, constraint: str) -> float:
    x = _number(key, value)
    if not x > 0:
        raise ConfigError(f"{key}: violates {constraint}")
    return x


def _sphere_params(key: str, raw: dict) -> dict:
    params: dict[str, Any] = {}
    params["geometry"] = _string(f"{key}.geometry", raw["geometry"], ("wedge", "tube"))
    params["domain"] = _string(f"{key}.domain", raw["domain"], ("half_meridian", "full_circle"))
    hw = _number(f"{key}.half_width", raw["half_width"])
    if not 0.0 < hw < math.pi / 2:
        raise ConfigError(f"{key}.half_width: violates 0 < half_width < pi/2")
    params["half_width"] = hw
    bins = _integer(f"{key}.bins", raw["bins"])
    if bins < 2:
        raise ConfigError(f"{key}.bins: violates bins >= 2")
    params["bins"] = bins
    samples = _integer(f"{key}.samples", raw["samples"])
    if samples < 0:
        raise ConfigError(f"{key}.samples: violates samples >= 0")
    params["samples"] = samples
    schedule = raw["schedule"]
    if schedule is not None:
        schedule = _number_list(f"{key}.schedule", schedule)
        if any(not 0.0 < h < math.pi / 2 for h in schedule):
            raise ConfigError(f"{key}.schedule: each half-width must lie in (0, pi/2)")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ConfigError(f"{key}.schedule: must be strictly decreasing")
    params["schedule"] = schedule
    return params


def _box_problem_params(key: str, raw: dict) -> dict:
    params: dict[str, Any] = {}
    params["sigma"] = _positive(f"{key}.sigma", raw["sigma"], "sigma > 0")
    a = _number(f"{key}.a", raw["a"])
    if a == 0.0:
        raise ConfigError(f"{key}.a: violates a != 0")
    b = _number(f"{key}.b", raw["b"])
    c = _number(f"{key}.c", raw["c"])
    if b == 0.0 and c == 0.0:
        raise ConfigError(f"{key}: at least one of b, c must be nonzero")
    params.update(a=a, b=b, c=c)
    params["d_obs"] = _number_list(f"{key}.d_obs", raw["d_obs"], length=3)
    cells = _integer(f"{key}.grid_cells", raw["grid_cells"])
    if cells < 2:
        raise ConfigError(f"{key}.grid_cells: violates grid_cells >= 2")
    params["grid_cells"] = cells
    return params


def _formulations_params(key: str, raw: dict) -> dict:
    params = _box_problem_params(key, raw)
    draws = _integer(f"{key}.draws", raw["draws"])
    if draws < 1:
        raise ConfigError(f"{key}.draws: violates draws >= 1")
    params["draws"] = draws
    return params


def _reparam_params(key: str, raw: dict) -> dict:
    params = _box_problem_params(key, raw)
    pts = _integer(f"{key}.support_points", raw["support_points"])
    if pts < 1:
        raise ConfigError(f"{key}.support_points: violates support_points >= 1")
    params["support_points"] = pts
    params["probes"] = _number_list(f"{key}.probes", raw["probes"])
    return params


def _map_demo_params(key: str, raw: dict) -> dict:
    params: dict[str, Any] = {}
    params["alpha"] = _positive(f"{key}.alpha", raw["alpha"], "alpha > 0")
    params["beta"] = _positive(f"{key}.beta", raw["beta"], "beta > 0")
    cells = _integer(f"{key}.cells", raw["cells"])
    if cells < 3:
        raise ConfigError(f"{key}.cells: violates cells >= 3")
    params["cells"] = cells
    scale = _number(f"{key}.affine_scale", raw["affine_scale"])
    if scale == 0.0:
        raise ConfigError(f"{key}.affine_scale: violates affine_scale != 0")
    params["affine_scale"] = scale
    params["affine_shift"] = _number(f"{key}.affine_shift", raw["affine_shift"])
    return params


def _evidence_demo_params(key: str, raw: dict) -> dict:
    params = _box_problem_params(key, raw)
    targets = _number_list(f"{key}.targets", raw["targets"])
    if any(t <= 0 for t in targets):
        raise ConfigError(f"{key}.targets: violates target > 0")
    params["targets"] = targets
    gamma_min = _number(f"{key}.gamma_min", raw["gamma_min"])
    gamma_max = _number(f"{key}.gamma_max", raw["gamma_max"])
    if not 0.0 < gamma_min < gamma_max:
        raise ConfigError(f"{key}: violates 0 < gamma_min < gamma_max")
    params.update(gamma_min=gamma_min, gamma_max=gamma_max)
    params["ratio_tol"] = _positive(f"{key}.ratio_tol", raw["ratio_tol"], "ratio_tol > 0")
    slack = _number(f"{key}.boundary_slack", raw["boundary_slack"])
    if slack < 0:
        raise ConfigError(f"{key}.boundary_slack: violates boundary_slack >= 0")
    params["boundary_slack"] = slack
    return params


def _hierarchy_params(key: str, raw: dict) -> dict:
    params: dict[str, Any] = {}
    params["y"] = _number(f"{key}.y", raw["y"])
    params["sigma"] = _positive(f"{key}.sigma", raw["sigma"], "sigma > 0")
    k_list = _number_list(f"{key}.k_list", raw["k_list"])
    if any(k == 0.0 for k in k_list) or len(set(k_list)) != len(k_list):
        raise ConfigError(f"{key}.k_list: entries must be distinct and nonzero")
    params["k_list"] = k_list
    points = _integer(f"{key}.lambda_points", raw["lambda_points"])
    if points < 100:
        raise ConfigError(f"{key}.lambda_points: violates lambda_points >= 100")
    params["lambda_points"] = points
    params["boundary_y"] = _number(f"{key}.boundary_y", raw["boundary_y"])
    return params


#: Per-experiment field defaults (``_REQUIRED`` means the key must be present)
#: and the validator applied to the completed table.
_SCHEMAS: dict[str, tuple[dict[str, Any], Callable[[str, dict], dict]]] = {
    "sphere": (
        {
            "geometry": _REQUIRED,
            "domain": _REQUIRED,
            "half_width": _REQUIRED,
            "bins": 36,
            "samples": 10_000_000,
            "schedule": None,
        },
        _sphere_params,
    ),
    "formulations": (
        {
            "sigma": 0.1,
            "a": 1.0,
            "b": 1.0,
            "c": 1.0,
            "d_obs": [0.5, 0.3, 0.3],
            "grid_cells": 401,
            "draws": 10_000,
        },
        _formulations_params,
    ),
    "reparam": (
        {
            "sigma": 0.1,
            "a": 1.0,
            "b": 1.0,
            "c": 1.0,
            "d_obs": [0.5, 0.3, 0.3],
            "grid_cells": 401,
            "support_points": 10_000,
            "probes": [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
        },
        _reparam_params,
    ),
    "map_demo": (
        {
            "alpha": 2.0,
            "beta": 5.0,
            "cells": 2001,
            "affine_scale": 2.0,
            "affine_shift": 1.0,
        },
        _map_demo_params,
    ),
    "evidence_demo": (
        {
            "sigma": 0.02,
            "a": 1.0,
            "b": 1.0,
            "c": 1.0,
            "d_obs": [0.5, 0.3, 0.3],
            "grid_cells": 401,
            "targets": [0.1, 1.0, 10.0],
            "gamma_min": 0.1,
            "gamma_max": 10.0,
            "ratio_tol": 1e-3,
            "boundary_slack": 0.05,
        },
        _evidence_demo_params,
    ),
    "hierarchy": (
        {
            "y": 2.0,
            "sigma": 1.0,
            "k_list": [1.0, 2.0, 5.0],
            "lambda_points": 10_000,
            "boundary_y": 0.5,
        },
        _hierarchy_params,
    ),
}


def parse_config(data: dict, source: str = "<config>") -> ExperimentConfig:
    """Validate a parsed TOML tree and return the experiment configuration."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a table")
    if "experiment" not in data:
        raise ConfigError("missing required key 'experiment'")
    experiment = _string("experiment", data["experiment"], EXPERIMENTS)

    allowed_top = {"experiment", "output_dir", "seed", experiment}
    for k in data:
        if k not in allowed_top:
            raise ConfigError(f"unknown key '{k}'")

    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("output_dir: expected a string")
    seed = data.get("seed", 0)
    seed = _integer("seed", seed)
    if seed < 0:
        raise ConfigError("seed: violates seed >= 0")

    table = data.get(experiment, {})
    if not isinstance(table, dict):
        raise ConfigError(f"'{experiment}' must be a table of parameters")
    defaults, validate = _SCHEMAS[experiment]
    for k in table:
        if k not in defaults:
            raise ConfigError(f"unknown key '{experiment}.{k}'")
    merged = dict(defaults)
    merged.update(table)
    missing = [k for k, v in merged.items() if v is _REQUIRED]
    if missing:
        raise ConfigError(f"missing required key '{experiment}.{missing[0]}'")
    params = validate(experiment, merged)
    return ExperimentConfig(experiment=experiment, output_dir=output_dir, seed=seed, params=params)


def load_config(path) -> ExperimentConfig:
    """Read and validate a TOML experiment configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return parse_config(data, source=str(path))
