"""Experiment configuration: a YAML file with a model block and per-experiment parameters.

Example
-------
.. code-block:: yaml

    experiment: density
    seed: 7
    output: runs/density
    model:
      d: 2
      alpha: 1.0
      kappa: 1.0
      cones:
        - axis: [1.0, 0.0]
          aperture: 0.7853981633974483
    params:
      times: [0.5, 1.0, 2.0]
      resolution: 512

Unknown keys are rejected.  ``params`` is merged over the defaults in
:data:`DEFAULT_PARAMS` when an experiment runs; the stored config keeps only
what the file said, so that parse -> serialize -> parse is the identity.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import ConfigError, DomainError
from ..geometry import ConeUnion

EXPERIMENTS = ("geom", "phi", "density", "simulate", "verify-envelope", "exit-time", "green",
               "levy-system")
ORACLE_EXPERIMENTS = ("density", "verify-envelope", "green")

QUARTER = math.pi / 4

DEFAULT_PARAMS: dict[str, dict] = {
    "geom": {"x": [0.0, 0.0], "y": [2.0, 0.0], "cone_index": 0},
    "phi": {"n_random": 100, "radius_range": [0.01, 100.0], "check_isotropy": False,
            "n_directions": 360, "homogeneity_tol": 1e-6, "isotropy_tol": 1e-3},
    "density": {"times": [0.5, 1.0, 2.0], "window_factor": 20.0, "resolution": 512,
                "mass_tol": 1e-3, "diagonal_times": [0.25, 1.0, 4.0], "diagonal_tol": 1e-3,
                "tol": 1e-10, "write_grids": True},
    "simulate": {"time": 1.0, "n_paths": 1000000, "x0": None, "delta_factor": 0.05,
                 "policy": "drop", "bandwidth": 1.0, "probes": None, "min_density": 0.01,
                 "rel_tol": 0.15, "record_paths": 20},
    "verify-envelope": {"times": [0.5, 1.0, 2.0], "radii": [0.5, 40.0], "n_radii": 20,
                        "fit_range": [5.0, 40.0], "axis_tol": 0.15, "offcone_tol": 0.2,
                        "max_spread": 1000.0},
    "exit-time": {"radii": [1.0, 2.0, 4.0, 8.0], "n_paths": 10000, "delta_ratio": 0.05,
                  "horizon_factor": 10.0, "n_times": 10, "slope_tol": 0.1, "n_se": 3.0,
                  "policy": "drop"},
    "green": {"distances": [1.0, 2.0, 4.0, 8.0], "direction": None, "tol": 1e-8,
              "slope_tol": 0.05},
    "levy-system": {"r_min": 0.2, "r_max": None, "horizon": 2.0, "n_paths": 10000,
                    "delta": 0.05, "x0": None, "n_se": 3.0,
                    "modulation": {"base": 1.0, "amplitude": 0.5, "frequency": 1.0},
                    "modulated_x0": [0.3, 0.0], "modulated_set": [0.2, 5.0]},
}

_TOP_KEYS = {"experiment", "seed", "output", "model", "params"}
_MODEL_KEYS = {"d", "alpha", "kappa", "cones"}


@dataclass(frozen=True)
class ModelSpec:
    """Dimension, stability index, comparability constant and cone list."""

    d: int = 2
    alpha: float = 1.0
    kappa: float = 1.0
    cones: tuple = (((1.0, 0.0), QUARTER),)

    def cone_union(self) -> ConeUnion:
        return ConeUnion.from_specs([(list(a), th) for a, th in self.cones], dimension=self.d)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "kappa": self.kappa,
            "cones": [{"axis": list(a), "aperture": th} for a, th in self.cones],
        }


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description (see the module docstring for the file format)."""

    experiment: str
    model: ModelSpec = field(default_factory=ModelSpec)
    params: dict = field(default_factory=dict)
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        validate(self)

    # -- accessors -------------------------------------------------------------

    def resolved_params(self) -> dict:
        """Defaults for the experiment overlaid with the configured values."""
        out = copy.deepcopy(DEFAULT_PARAMS[self.experiment])
        out.update(copy.deepcopy(self.params))
        return out

    def replace(self, **kw) -> "ExperimentConfig":
        d = {"experiment": self.experiment, "model": self.model, "params": self.params,
             "seed": self.seed, "output": self.output}
        d.update(kw)
        return ExperimentConfig(**d)

    def with_params(self, **kw) -> "ExperimentConfig":
        p = copy.deepcopy(self.params)
        p.update(kw)
        return self.replace(params=p)

    # -- serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"experiment": self.experiment, "seed": self.seed, "model": self.model.to_dict(),
             "params": copy.deepcopy(self.params)}
        if self.output is not None:
            d["output"] = self.output
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=None)

    def config_hash(self) -> str:
        """SHA-256 of the canonical model, params, seed and experiment (output dir excluded)."""
        d = self.to_dict()
        d.pop("output", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping at the top level")
        extra = set(raw) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "experiment" not in raw:
            raise ConfigError("config needs an 'experiment' key")
        model = _parse_model(raw.get("model") or {})
        params = raw.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError("'params' must be a mapping")
        seed = raw.get("seed", 0)
        output = raw.get("output")
        return cls(experiment=raw["experiment"], model=model, params=params, seed=seed,
                   output=None if output is None else str(output))

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML: {exc}") from exc
        return cls.from_dict(raw if raw is not None else {})


def _parse_model(raw) -> ModelSpec:
    if not isinstance(raw, dict):
        raise ConfigError("'model' must be a mapping")
    extra = set(raw) - _MODEL_KEYS
    if extra:
        raise ConfigError(f"unknown model keys: {sorted(extra)}")
    d = raw.get("d", 2)
    cones_raw = raw.get("cones")
    if cones_raw is None:
        axis = [1.0, 0.0] + [0.0] * (max(int(d), 2) - 2) if isinstance(d, int) else [1.0, 0.0]
        cones = ((tuple(axis), QUARTER),)
    else:
        if not isinstance(cones_raw, list) or not cones_raw:
            raise ConfigError("'cones' must be a non-empty list")
        cones = []
        for c in cones_raw:
            if not isinstance(c, dict) or set(c) != {"axis", "aperture"}:
                raise ConfigError("each cone needs exactly 'axis' and 'aperture'")
            if not isinstance(c["axis"], list):
                raise ConfigError("cone axis must be a list of numbers")
            cones.append((tuple(_number(v, "axis component") for v in c["axis"]),
                          _number(c["aperture"], "aperture")))
        cones = tuple(cones)
    return ModelSpec(d=d, alpha=raw.get("alpha", 1.0), kappa=raw.get("kappa", 1.0), cones=cones)


def _number(v, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{what} must be a number, got {v!r}")
    return float(v)


def validate(cfg: ExperimentConfig) -> None:
    """Check every domain constraint; raises :class:`ConfigError`."""
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    m = cfg.model
    if isinstance(m.d, bool) or not isinstance(m.d, int) or m.d < 2:
        raise ConfigError(f"model.d must be an integer >= 2, got {m.d!r}")
    alpha = _number(m.alpha, "model.alpha")
    if not 0.0 < alpha < 2.0:
        raise ConfigError(f"model.alpha must lie in (0, 2), got {alpha}")
    kappa = _number(m.kappa, "model.kappa")
    if not kappa >= 1.0:
        raise ConfigError(f"model.kappa must be >= 1, got {kappa}")
    for axis, th in m.cones:
        if len(axis) != m.d:
            raise ConfigError(f"cone axis {list(axis)} does not have {m.d} components")
        if not 0.0 < th <= math.pi / 2:
            raise ConfigError(f"cone aperture must lie in (0, pi/2], got {th}")
    try:
        m.cone_union()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.experiment in ORACLE_EXPERIMENTS and m.d != 2:
        raise ConfigError(f"experiment {cfg.experiment!r} uses the Fourier oracle and needs d = 2")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 1 << 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg.seed!r}")
    unknown = set(cfg.params) - set(DEFAULT_PARAMS[cfg.experiment])
    if unknown:
        raise ConfigError(f"unknown params for {cfg.experiment}: {sorted(unknown)}")
    object.__setattr__(cfg, "model", ModelSpec(d=m.d, alpha=alpha, kappa=kappa, cones=m.cones))


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return ExperimentConfig.from_yaml(text)


def default_config(experiment: str) -> ExperimentConfig:
    """Config with default model and parameters for ``experiment``.

    The Lévy-system default uses ``kappa = 2`` so that the default modulation
    ``1 + 0.5 sin(.)`` fits inside ``[1/kappa, kappa]``.
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    model = ModelSpec(kappa=2.0) if experiment == "levy-system" else ModelSpec()
    return ExperimentConfig(experiment=experiment, model=model)
