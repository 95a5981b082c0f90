"""Run configuration: one JSON document, optional environment overrides.

Schema (keys not listed are rejected)::

    {
      "dimension": 3,                          # N >= 3
      "potential": {"family": "rational_decay", "a": 1, "p": 2,
                    "b": 0, "q": 1, "decay_bound": [1, 2]},
      "absorption": {"family": "power", "p": 2},
      "nodes_per_unit": 256,
      "R_schedule": [1, 2, 4, 8, 16, 32, 64],  # lambda_1 curve
      "solve_schedule": [4, 8, 16, 32],        # expanding balls (default: R_schedule)
      "radius": 1.0,                           # single-ball commands
      "node_count": null,                      # overrides nodes_per_unit for eig
      "lambda": null,                          # absolute lambda ...
      "lambda_relative": 1.5,                  # ... or a multiple of the estimated Lambda
      "lambda_grid": null,                     # absolute sweep grid ...
      "lambda_grid_relative": [0.5, 0.75, 1.25, 1.5],
      "tolerances": {"tol": 1e-10, "tol_fix": 1e-10, "tol_res": 1e-8,
                     "extinction_tol": null, "tol_stage": 0.05, "eig_tol": 1e-11},
      "solution": "solve/solution.json",      # input of verify
      "seed": 0
    }

Potential families: rational_decay (a, p, b, q), gaussian_bump (c), constant
(value) and tabulated (table: path to a two-column CSV r,V).  Absorption
families: power (p) and saturating (k).  Relative paths are resolved against
the config file's directory.

Environment variables ``LOGISTIC_THRESHOLD_<KNOB>`` (e.g.
``LOGISTIC_THRESHOLD_TOL_FIX=1e-9``) override the tolerance knobs.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import problem
from .logistic import SolveOptions

ENV_PREFIX = "LOGISTIC_THRESHOLD_"
TOLERANCE_KEYS = ("tol", "tol_fix", "tol_res", "extinction_tol", "tol_stage", "eig_tol")
DEFAULT_TOLERANCES = {"tol": 1e-10, "tol_fix": 1e-10, "tol_res": 1e-8, "extinction_tol": None,
                      "tol_stage": 5e-2, "eig_tol": 1e-11}
KNOWN_KEYS = {"dimension", "potential", "absorption", "nodes_per_unit", "R_schedule",
              "solve_schedule", "radius", "node_count", "lambda", "lambda_relative",
              "lambda_grid", "lambda_grid_relative", "tolerances", "solution", "seed",
              "description"}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    dimension: int
    potential_spec: dict
    absorption_spec: Optional[dict]
    nodes_per_unit: int
    R_schedule: tuple
    solve_schedule: tuple
    radius: float
    node_count: Optional[int]
    lam: Optional[float]
    lambda_relative: Optional[float]
    lambda_grid: Optional[tuple]
    lambda_grid_relative: Optional[tuple]
    tolerances: dict
    solution: Optional[Path]
    seed: int
    base_dir: Path = field(default_factory=Path.cwd)
    raw: dict = field(default_factory=dict, repr=False)

    def solve_options(self):
        t = self.tolerances
        return SolveOptions(tol_fix=t["tol_fix"], tol_res=t["tol_res"],
                            extinction_tol=t["extinction_tol"], eig_tol=t["eig_tol"],
                            tol_stage=t["tol_stage"], nodes_per_unit=self.nodes_per_unit,
                            dim=self.dimension)

    def build_potential(self):
        return build_potential(self.potential_spec, self.base_dir)

    def build_absorption(self):
        if self.absorption_spec is None:
            raise ConfigError("this command needs an 'absorption' section")
        return build_absorption(self.absorption_spec)


def _float_tuple(values, name):
    if values is None:
        return None
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a list of numbers") from exc


def _increasing(values, name):
    if values is not None and any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} must be strictly increasing")


def build_potential(spec, base_dir=Path(".")):
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("potential needs a 'family'")
    spec = dict(spec)
    family = spec.pop("family")
    bound = spec.pop("decay_bound", None)
    try:
        if family == "rational_decay":
            return problem.rational_decay(decay_bound=bound, **spec)
        if family == "gaussian_bump":
            return problem.gaussian_bump(decay_bound=bound, **spec)
        if family == "constant":
            return problem.constant_potential(**spec)
        if family == "tabulated":
            table = Path(spec.pop("table"))
            if spec:
                raise TypeError(f"unexpected keys {sorted(spec)}")
            path = table if table.is_absolute() else base_dir / table
            data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
            return problem.tabulated(data[:, 0], data[:, 1], decay_bound=bound)
    except (TypeError, KeyError, OSError) as exc:
        raise ConfigError(f"bad parameters for potential family {family!r}: {exc}") from exc
    raise ConfigError(f"unknown potential family {family!r}")


def build_absorption(spec):
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("absorption needs a 'family'")
    spec = dict(spec)
    family = spec.pop("family")
    factories = {"power": problem.power_absorption, "saturating": problem.saturating_absorption}
    if family not in factories:
        raise ConfigError(f"unknown absorption family {family!r}")
    try:
        return factories[family](**spec)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for absorption family {family!r}: {exc}") from exc


def _env_overrides(env):
    out = {}
    for key in TOLERANCE_KEYS:
        name = ENV_PREFIX + key.upper()
        if name in env:
            try:
                out[key] = float(env[name])
            except ValueError as exc:
                raise ConfigError(f"{name} is not a number: {env[name]!r}") from exc
    return out


def parse_config(raw, base_dir=Path("."), env=None):
    """Validate a decoded config document and apply environment overrides."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "potential" not in raw:
        raise ConfigError("config needs a 'potential' section")
    if not isinstance(raw["potential"], dict) or "family" not in raw["potential"]:
        raise ConfigError("potential needs a 'family'")

    dim = raw.get("dimension", 3)
    if not isinstance(dim, int) or dim < 3:
        raise ConfigError("dimension must be an integer >= 3")
    npu = raw.get("nodes_per_unit", 256)
    if not isinstance(npu, int) or npu < 2:
        raise ConfigError("nodes_per_unit must be an integer >= 2")

    schedule = _float_tuple(raw.get("R_schedule", [1, 2, 4, 8, 16, 32, 64]), "R_schedule")
    _increasing(schedule, "R_schedule")
    solve_schedule = _float_tuple(raw.get("solve_schedule"), "solve_schedule") or schedule
    _increasing(solve_schedule, "solve_schedule")
    lam_grid = _float_tuple(raw.get("lambda_grid"), "lambda_grid")
    rel_grid = _float_tuple(raw.get("lambda_grid_relative"), "lambda_grid_relative")
    _increasing(lam_grid, "lambda_grid")
    _increasing(rel_grid, "lambda_grid_relative")

    tol = dict(DEFAULT_TOLERANCES)
    given = raw.get("tolerances", {}) or {}
    if not isinstance(given, dict) or set(given) - set(TOLERANCE_KEYS):
        raise ConfigError(f"tolerances must be an object with keys from {TOLERANCE_KEYS}")
    tol.update(given)
    tol.update(_env_overrides(os.environ if env is None else env))
    for key, value in tol.items():
        if value is None and key == "extinction_tol":
            continue
        if not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"tolerance {key} must be positive, got {value!r}")

    radius = float(raw.get("radius", 1.0))
    if not radius > 0:
        raise ConfigError("radius must be positive")
    node_count = raw.get("node_count")
    if node_count is not None and (not isinstance(node_count, int) or node_count < 2):
        raise ConfigError("node_count must be an integer >= 2")
    solution = raw.get("solution")
    if solution is not None:
        solution = Path(solution)
        solution = solution if solution.is_absolute() else base_dir / solution

    cfg = RunConfig(
        dimension=dim, potential_spec=raw["potential"], absorption_spec=raw.get("absorption"),
        nodes_per_unit=npu, R_schedule=schedule, solve_schedule=solve_schedule, radius=radius,
        node_count=node_count,
        lam=None if raw.get("lambda") is None else float(raw["lambda"]),
        lambda_relative=None if raw.get("lambda_relative") is None
        else float(raw["lambda_relative"]),
        lambda_grid=lam_grid, lambda_grid_relative=rel_grid, tolerances=tol,
        solution=solution, seed=int(raw.get("seed", 0)), base_dir=Path(base_dir), raw=raw,
    )
    # fail early on bad family parameters
    cfg.build_potential()
    if cfg.absorption_spec is not None:
        try:
            cfg.build_absorption()
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path, env=None):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, path.parent, env)
