import json
import math

import pytest
import yaml

from conekernel import ConfigError
from conekernel.harness import (
    EXPERIMENTS,
    CheckResult,
    ExperimentConfig,
    ModelSpec,
    VerificationReport,
    default_config,
    load_config,
    run_experiment,
    write_csv,
)

FULL_YAML = """
experiment: simulate
seed: 17
output: runs/sim
model:
  d: 2
  alpha: 1.5
  kappa: 2.0
  cones:
    - axis: [1.0, 0.0]
      aperture: 0.5
    - axis: [0.0, 1.0]
      aperture: 0.25
params:
  n_paths: 5000
  policy: gaussian-moment-match
  probes: [[0.0, 0.0], [1.0, 0.5]]
"""


def test_yaml_round_trip_is_identity():
    a = ExperimentConfig.from_yaml(FULL_YAML)
    b = ExperimentConfig.from_yaml(a.to_yaml())
    assert a == b
    assert a.to_yaml() == b.to_yaml()
    assert a.config_hash() == b.config_hash()


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_defaults_round_trip(name):
    c = default_config(name)
    assert ExperimentConfig.from_yaml(c.to_yaml()) == c
    assert set(c.resolved_params()) == set(ExperimentConfig.from_yaml(c.to_yaml()).resolved_params())


def test_output_excluded_from_hash():
    a = ExperimentConfig.from_yaml(FULL_YAML)
    assert a.replace(output="elsewhere").config_hash() == a.config_hash()
    assert a.replace(seed=18).config_hash() != a.config_hash()


def test_params_overlay_defaults():
    p = ExperimentConfig.from_yaml(FULL_YAML).resolved_params()
    assert p["n_paths"] == 5000 and p["time"] == 1.0


BAD = [
    "experiment: nope",
    "experiment: geom\nextra: 1",
    "experiment: geom\nmodel: {alpha: 2.0}",
    "experiment: geom\nmodel: {alpha: 0}",
    "experiment: geom\nmodel: {kappa: 0.5}",
    "experiment: geom\nmodel: {d: 3, cones: [{axis: [1, 0], aperture: 0.5}]}",
    "experiment: geom\nmodel: {cones: [{axis: [1, 0], aperture: 2.0}]}",
    "experiment: geom\nmodel: {cones: [{axis: [0, 0], aperture: 0.5}]}",
    "experiment: geom\nmodel: {cones: [{axis: [1, 0]}]}",
    "experiment: geom\nmodel: {cones: []}",
    "experiment: geom\nmodel: {speed: 1}",
    "experiment: density\nmodel: {d: 3}",
    "experiment: geom\nseed: -1",
    "experiment: geom\nseed: 18446744073709551616",
    "experiment: geom\nparams: {bogus: 1}",
    "experiment: geom\nparams: [1, 2]",
    "- just a list",
    "experiment: geom\n  bad: [",
    "seed: 1",
]


@pytest.mark.parametrize("text", BAD)
def test_invalid_configs_rejected(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_yaml(text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_model_spec_default_cone():
    assert ModelSpec().cone_union().dimension == 2
    c = ExperimentConfig.from_yaml("experiment: simulate\nmodel: {d: 3}")
    assert c.model.cones[0][0] == (1.0, 0.0, 0.0)


def test_report_semantics():
    r = VerificationReport("x", {"seed": 1})
    assert not r.passed
    r.add("a", True, 1.0, 2.0)
    r.add("b", True, 0.5, 1.0)
    assert r.passed
    r.add("c", False, 3.0, 1.0)
    assert not r.passed
    with pytest.raises(ValueError):
        r.add("a", True, 0.0, 0.0)
    assert CheckResult("a", False, 1, 2).status == "fail"


def test_write_csv_has_schema_line(tmp_path):
    f = tmp_path / "t.csv"
    write_csv(f, ["a", "b"], [[1, 0.5], [2, 0.25]], "a int, b float")
    lines = f.read_text().splitlines()
    assert lines[0].startswith("# schema:") and lines[1] == "a,b" and len(lines) == 4


def _cheap(name):
    c = default_config(name)
    small = {
        "density": {"times": [1.0], "resolution": 16, "window_factor": 4.0, "diagonal_times": [1.0, 2.0]},
        "simulate": {"n_paths": 20000, "record_paths": 3, "probes": [[0.0, 0.0], [1.0, 0.0]]},
        "verify-envelope": {"n_radii": 6},
        "exit-time": {"radii": [1.0, 2.0], "n_paths": 2000},
        "green": {"distances": [1.0, 2.0]},
        "levy-system": {"n_paths": 2000},
    }
    return c.with_params(**small.get(name, {}))


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_runs_are_deterministic(name, tmp_path):
    cfg = _cheap(name).replace(seed=3)
    r1 = run_experiment(cfg, tmp_path / "a")
    r2 = run_experiment(cfg, tmp_path / "b")
    assert r1.content() == r2.content()
    rep = json.loads((tmp_path / "a" / "report.json").read_text())
    assert rep["environment"]["seed"] == 3
    assert rep["environment"]["config_hash"] == cfg.config_hash()
    snap = ExperimentConfig.from_yaml((tmp_path / "a" / "config.yaml").read_text())
    assert snap.config_hash() == cfg.config_hash()
    for csv in (tmp_path / "a").glob("*.csv"):
        assert csv.read_text().startswith("#")
    assert r1.checks


def test_small_runs_pass(tmp_path):
    for name in ("geom", "phi", "green", "levy-system"):
        assert run_experiment(_cheap(name), tmp_path / name).passed, name


def test_phi_isotropy_check(tmp_path):
    cfg = default_config("phi").replace(model=ModelSpec(cones=(((1.0, 0.0), math.pi / 2), ((0.0, 1.0), math.pi / 2))))
    rep = run_experiment(cfg.with_params(check_isotropy=True), tmp_path)
    assert [c.name for c in rep.checks] == ["phi_homogeneity", "phi_isotropy"]
    assert rep.passed
    aniso = run_experiment(default_config("phi").with_params(check_isotropy=True), tmp_path / "b")
    assert not aniso.passed
