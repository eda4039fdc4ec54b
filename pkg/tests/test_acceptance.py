"""The thirteen acceptance criteria, each at its stated tolerance and time budget."""
import math
import time

import numpy as np
import pytest

from conekernel.geometry import ConeUnion, SymmetricCone, cone_contains, dist_to_cone, meeting_points
from conekernel.harness import ExperimentConfig, ModelSpec, default_config, run_experiment
from conekernel.levy import tail_mass

from oracles import brute_meeting, tail_mass_cartesian

Q = math.pi / 4


def _run(name, tmp_path, model=None, **params):
    cfg = default_config(name)
    if model is not None:
        cfg = cfg.replace(model=model)
    if params:
        cfg = cfg.with_params(**params)
    t0 = time.perf_counter()
    rep = run_experiment(cfg, tmp_path)
    return rep, time.perf_counter() - t0


def _checks(rep, prefix=""):
    return [c for c in rep.checks if c.name.startswith(prefix)]


def _judge(log, number, name, results, runtime, budget):
    """``results``: list of (passed, measured, threshold)."""
    ok = all(r[0] for r in results) and runtime < budget
    measured = [r[1] for r in results]
    threshold = results[0][2] if len({repr(r[2]) for r in results}) == 1 else [r[2] for r in results]
    log(number, name, ok, measured if len(measured) > 1 else measured[0], threshold, runtime)
    for r in results:
        assert r[0], f"{name}: measured {r[1]} outside {r[2]}"
    assert runtime < budget, f"{name}: {runtime:.1f}s over the {budget}s budget"


def test_criterion_01_phi_homogeneity(tmp_path, acceptance_log):
    res, total = [], 0.0
    for a in (0.5, 1.0, 1.5):
        rep, dt = _run("phi", tmp_path / str(a), ModelSpec(alpha=a))
        c = _checks(rep, "phi_homogeneity")[0]
        res.append((c.passed, c.measured, c.threshold))
        total += dt
    _judge(acceptance_log, 1, "phi homogeneity", res, total, 10)


def test_criterion_02_isotropic_degeneration(tmp_path, acceptance_log):
    model = ModelSpec(cones=(((1.0, 0.0), math.pi / 2), ((0.0, 1.0), math.pi / 2)))
    rep, dt = _run("phi", tmp_path, model, check_isotropy=True, n_directions=360)
    c = _checks(rep, "phi_isotropy")[0]
    _judge(acceptance_log, 2, "isotropic degeneration", [(c.passed, c.measured, c.threshold)], dt, 10)


@pytest.fixture(scope="module")
def density_run(tmp_path_factory):
    return _run("density", tmp_path_factory.mktemp("density"))


def test_criterion_03_conservativeness(density_run, acceptance_log):
    rep, _ = density_run
    cs = _checks(rep, "grid_mass_t=")
    assert len(cs) == 3
    runtime = sum(c.runtime for c in cs)
    _judge(acceptance_log, 3, "grid mass", [(c.passed, c.measured, c.threshold) for c in cs], runtime, 120)


def test_criterion_04_on_diagonal(density_run, acceptance_log):
    rep, _ = density_run
    c = _checks(rep, "on_diagonal_scaling")[0]
    _judge(acceptance_log, 4, "on-diagonal scaling", [(c.passed, c.measured, c.threshold)], c.runtime, 60)


@pytest.fixture(scope="module")
def envelope_runs(tmp_path_factory):
    a = _run("verify-envelope", tmp_path_factory.mktemp("env_a"))
    b_dir = tmp_path_factory.mktemp("env_b")
    b = _run("verify-envelope", b_dir)
    return a, b, b_dir


def test_criterion_05_envelope_shape(envelope_runs, acceptance_log):
    (rep, dt), _, _ = envelope_runs
    cs = _checks(rep, "axis_exponent") + _checks(rep, "offcone_exponent")
    _judge(acceptance_log, 5, "decay exponents (axis, offcone)",
           [(c.passed, c.measured, c.threshold) for c in cs], dt, 300)


def test_criterion_06_envelope_sandwich(envelope_runs, acceptance_log):
    (rep, dt), (rep2, _), _ = envelope_runs
    cs = _checks(rep, "ratio_finite") + _checks(rep, "ratio_spread")
    res = [(c.passed, c.measured, c.threshold) for c in cs]
    res.append((rep.content() == rep2.content(), "bitwise" if rep.content() == rep2.content() else "differs",
                "identical reruns"))
    _judge(acceptance_log, 6, "envelope sandwich", res, dt, 300)


def test_criterion_07_mc_oracle(tmp_path, acceptance_log):
    rep, dt = _run("simulate", tmp_path, n_paths=1_000_000, delta_factor=0.05)
    c = _checks(rep, "mc_oracle_agreement")[0]
    assert len(rep.diagnostics["relative_errors"]) == 9
    _judge(acceptance_log, 7, "MC vs oracle", [(c.passed, c.measured, c.threshold)], dt, 600)


@pytest.fixture(scope="module")
def exit_runs(tmp_path_factory):
    out = {}
    for a in (0.7, 1.3):
        out[a] = _run("exit-time", tmp_path_factory.mktemp(f"exit{a}"), ModelSpec(alpha=a),
                      radii=[1.0, 2.0, 4.0, 8.0], n_paths=10_000)
    return out


def test_criterion_08_exit_time_scaling(exit_runs, acceptance_log):
    res = [(c.passed, c.measured, c.threshold) for rep, _ in exit_runs.values()
           for c in _checks(rep, "mean_exit_slope")]
    _judge(acceptance_log, 8, "exit-time slope (alpha 0.7, 1.3)", res,
           sum(dt for _, dt in exit_runs.values()), 300)


def test_criterion_09_survival_collapse(exit_runs, acceptance_log):
    res = []
    for rep, _ in exit_runs.values():
        c = _checks(rep, "survival_collapse")[0]
        res.append((c.passed, c.measured, c.threshold))
    _judge(acceptance_log, 9, "survival collapse (alpha 0.7, 1.3)", res,
           sum(dt for _, dt in exit_runs.values()), 300)


def test_criterion_10_green_scaling(tmp_path, acceptance_log):
    res, total = [], 0.0
    for a in (0.5, 1.0):
        rep, dt = _run("green", tmp_path / str(a), ModelSpec(alpha=a), distances=[1.0, 2.0, 4.0, 8.0])
        c = _checks(rep, "green_slope")[0]
        res.append((c.passed, c.measured, c.threshold))
        total += dt
    _judge(acceptance_log, 10, "Green slope (alpha 0.5, 1)", res, total, 300)


def test_criterion_11_tail_mass(acceptance_log):
    t0 = time.perf_counter()
    worst = 0.0
    for th in (math.pi / 8, Q):
        V = ConeUnion.single((1.0, 0.0), th)
        for a in (0.5, 1.5):
            for delta in (0.5, 1.0, 2.0):
                ref = tail_mass_cartesian(th, a, delta)
                worst = max(worst, abs(tail_mass(V, a, delta) - ref) / ref)
    _judge(acceptance_log, 11, "tail mass vs Cartesian quadrature", [(worst < 5e-3, worst, 5e-3)],
           time.perf_counter() - t0, 30)


def test_criterion_12_geometry_suite(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_brute = worst_leg = worst_c2 = 0.0
    n_meet = n_c2 = 0
    while n_meet < 1000:
        b = rng.uniform(0, math.pi)
        axis = (math.cos(b), math.sin(b))
        th = rng.uniform(0.1, 1.4)
        x, y = rng.uniform(-2, 2, (2, 2))
        c = SymmetricCone(axis, th)
        if np.allclose(x, y):
            continue
        ms = meeting_points(c, x, y)
        best, _ = brute_meeting(axis, th, x, y)
        worst_brute = max(worst_brute, abs(ms.min_sum - best) / max(1.0, best))
        if not ms.direct:
            z, zb = ms.points
            worst_leg = max(worst_leg, float(abs(np.linalg.norm(x - z) - np.linalg.norm(y - zb))))
        n_meet += 1
    while n_c2 < 1000:
        b = rng.uniform(0, math.pi)
        c = SymmetricCone((math.cos(b), math.sin(b)), Q)
        x, y = rng.uniform(-5, 5, (2, 2))
        if cone_contains(c, y - x):
            continue
        ms = meeting_points(c, x, y)
        small = min(np.linalg.norm(x - ms.points[0]), np.linalg.norm(x - ms.points[1]))
        worst_c2 = max(worst_c2, float(abs(dist_to_cone(c, y - x) - small)))
        n_c2 += 1
    dt = time.perf_counter() - t0
    _judge(acceptance_log, 12, "geometry (brute, legs, pi/4 equality)",
           [(worst_brute < 1e-4, worst_brute, 1e-4), (worst_leg < 1e-9, worst_leg, 1e-9),
            (worst_c2 < 1e-9, worst_c2, 1e-9)], dt, 60)


def test_criterion_13_levy_system(tmp_path, acceptance_log):
    rep, dt = _run("levy-system", tmp_path, n_paths=10_000)
    cs = _checks(rep, "levy_case") + _checks(rep, "modulated_case")
    assert len(cs) == 2
    _judge(acceptance_log, 13, "Levy system (plain, modulated)",
           [(c.passed, c.measured, c.threshold) for c in cs], dt, 300)
