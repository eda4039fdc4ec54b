import math

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from conekernel.envelope import ModelParams, hk_envelope, isotropic_envelope
from conekernel.geometry import (
    ConeUnion,
    SymmetricCone,
    cone_contains,
    dist_to_cone,
    dist_to_union,
    meeting_legs,
    meeting_points,
)
from conekernel.harness import ExperimentConfig, ModelSpec
from conekernel.levy import char_exponent
from conekernel.rng import PathStream
from conekernel.simulate import sample_jump

coord = st.floats(-50, 50, allow_nan=False)
point = st.tuples(coord, coord)
angle = st.floats(0, 2 * math.pi)
aperture = st.floats(0.01, math.pi / 2)
alpha = st.floats(0.05, 1.95)
positive = st.floats(1e-3, 1e3)


def unit(a):
    return (math.cos(a), math.sin(a))


@given(angle, aperture, point, st.floats(0.01, 100))
def test_distance_homogeneous_and_even(a, th, w, lam):
    c = SymmetricCone(unit(a), th)
    w = np.array(w)
    d = dist_to_cone(c, w)
    assert 0 <= d <= np.linalg.norm(w) + 1e-12
    assert math.isclose(dist_to_cone(c, lam * w), lam * d, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(dist_to_cone(c, -w), d, rel_tol=1e-12, abs_tol=1e-12)


@given(angle, aperture, point)
def test_distance_zero_iff_inside(a, th, w):
    c = SymmetricCone(unit(a), th)
    assume(np.linalg.norm(w) > 1e-6)
    d = dist_to_cone(c, w)
    if cone_contains(c, w):
        assert d == 0.0
    else:
        # outside: |w| times the sine of the angle beyond the aperture
        r = float(np.linalg.norm(w))
        psi = math.acos(min(1.0, abs(np.dot(unit(a), w)) / r))
        assert math.isclose(d, r * math.sin(max(0.0, psi - th)), rel_tol=1e-9, abs_tol=1e-9 * r)


@given(angle, aperture, point, point)
def test_meeting_legs_ordering(a, th, x, y):
    c = SymmetricCone(unit(a), th)
    x, y = np.array(x), np.array(y)
    assume(np.linalg.norm(y - x) > 1e-6)
    big, small = meeting_legs(c, x, y)
    assert big >= small >= 0
    ms = meeting_points(c, x, y)
    assert ms.min_sum >= np.linalg.norm(y - x) - 1e-9
    if not ms.direct:
        assert dist_to_cone(c, y - x) <= small + 1e-9 * (1 + np.linalg.norm(y - x))


@given(angle, aperture, alpha, positive, point, point)
def test_envelope_symmetric_and_bounded(a, th, al, t, x, y):
    V = ConeUnion.single(unit(a), th)
    p = ModelParams(al)
    v = hk_envelope(t, x, y, V, p)
    assert v > 0
    assert math.isclose(v, hk_envelope(t, y, x, V, p), rel_tol=1e-12)
    # never above the diagonal value nor below the isotropic form times the off-cone factor
    assert v <= t ** (-2 / al) * (1 + 1e-12)
    assert v <= isotropic_envelope(t, np.linalg.norm(np.subtract(y, x)), p) * (1 + 1e-12)


@given(angle, aperture, alpha, st.floats(0.01, 100), angle)
def test_exponent_homogeneous(a, th, al, lam, b):
    V = ConeUnion.single(unit(a), th)
    xi = np.array(unit(b))
    assert math.isclose(char_exponent(lam * xi, V, al), lam ** al * char_exponent(xi, V, al), rel_tol=1e-10)


@given(angle, aperture, alpha, st.floats(0.01, 10), st.integers(0, 2 ** 64 - 1), st.integers(0, 2 ** 32 - 1))
def test_jumps_live_in_the_cone(a, th, al, delta, seed, path):
    V = ConeUnion.single(unit(a), th)
    z = sample_jump(V, al, delta, PathStream(seed, 0, path))
    assert np.linalg.norm(z) > delta * (1 - 1e-12)
    assert dist_to_union(V, z) <= 1e-9 * np.linalg.norm(z)


@given(st.integers(0, 2 ** 64 - 1), alpha, st.floats(1.0, 10.0), aperture, angle,
       st.sampled_from(["geom", "phi", "simulate", "exit-time", "levy-system"]),
       st.integers(10, 10 ** 6))
def test_config_yaml_round_trip(seed, al, kappa, th, a, exp, n):
    params = {"n_paths": n} if exp in ("simulate", "exit-time", "levy-system") else {}
    cfg = ExperimentConfig(exp, ModelSpec(alpha=al, kappa=kappa, cones=((unit(a), th),)), params, seed)
    back = ExperimentConfig.from_yaml(cfg.to_yaml())
    assert back == cfg
    assert back.to_yaml() == cfg.to_yaml()
