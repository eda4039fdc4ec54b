import math

import numpy as np
import pytest

from conekernel import DomainError
from conekernel.envelope import (
    ModelParams,
    green_envelope,
    hk_envelope,
    hk_envelope_many,
    hk_envelope_product,
    isotropic_envelope,
)
from conekernel.geometry import ConeUnion, SymmetricCone, dist_to_union

Q = math.pi / 4


@pytest.fixture
def V():
    return ConeUnion.single((0.0, 1.0), Q)


def test_diagonal(V):
    p = ModelParams(1.5)
    assert hk_envelope(0.7, (1, 2), (1, 2), V, p) == pytest.approx(0.7 ** (-2 / 1.5), rel=1e-15)


def test_near_cone_reduces_to_isotropic(V, rng):
    p = ModelParams(1.0)
    for _ in range(50):
        y = rng.uniform(-5, 5, 2)
        t = rng.uniform(0.1, 3)
        if dist_to_union(V, y) <= t:
            assert hk_envelope(t, (0, 0), y, V, p) == pytest.approx(
                isotropic_envelope(t, np.linalg.norm(y), p), rel=1e-14)


def test_self_similarity(V, rng):
    for a in (0.5, 1.0, 1.7):
        p = ModelParams(a)
        for _ in range(50):
            t, s = rng.uniform(0.1, 3, 2)
            x, y = rng.uniform(-4, 4, (2, 2))
            lhs = hk_envelope(s * t, s ** (1 / a) * x, s ** (1 / a) * y, V, p)
            assert lhs == pytest.approx(s ** (-2 / a) * hk_envelope(t, x, y, V, p), rel=1e-12)


def test_symmetry_and_vectorised(V, rng):
    p = ModelParams(1.2)
    Y = rng.uniform(-4, 4, (100, 2))
    x = np.array([0.3, -0.2])
    vals = hk_envelope_many(0.8, x, Y, V, p)
    for y, v in zip(Y, vals):
        assert v == pytest.approx(hk_envelope(0.8, x, y, V, p), rel=1e-14)
        assert hk_envelope(0.8, y, x, V, p) == pytest.approx(v, rel=1e-14)


def test_monotone_along_rays(V, rng):
    p = ModelParams(0.8)
    s = np.geomspace(0.01, 100, 200)
    for _ in range(10):
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        vals = hk_envelope_many(1.0, np.zeros(2), s[:, None] * u, V, p)
        assert np.all(np.diff(vals) <= 1e-15 * vals[:-1])


def test_time_validated(V):
    with pytest.raises(DomainError):
        hk_envelope(0.0, (0, 0), (1, 0), V, ModelParams(1.0))
    with pytest.raises(DomainError):
        hk_envelope_product(-1.0, (0, 0), (1, 0), V.cones[0], ModelParams(1.0))


@pytest.mark.parametrize("kw", [{"alpha": 0.0}, {"alpha": 2.0}, {"alpha": 1.0, "kappa": 0.5},
                                {"alpha": 1.0, "dimension": 1}])
def test_params_validated(kw):
    with pytest.raises(DomainError):
        ModelParams(**kw)


def test_product_form_cases(V):
    p = ModelParams(1.0)
    c = V.cones[0]
    # y - x in the cone: isotropic form
    assert hk_envelope_product(1.0, (0, 0), (0.2, 3), c, p) == pytest.approx(
        isotropic_envelope(1.0, math.hypot(0.2, 3), p), rel=1e-14)
    assert hk_envelope_product(2.0, (1, 1), (1, 1), c, p) == pytest.approx(2.0 ** -2)


def _product_ratio_bounds(c, V, p, seed):
    g = np.random.default_rng(seed)
    rs = []
    for _ in range(10000):
        t = math.exp(g.uniform(-2, 2))
        x, y = g.uniform(-5, 5, (2, 2))
        rs.append(hk_envelope_product(t, x, y, c, p) / hk_envelope(t, x, y, V, p))
    return min(rs), max(rs)


@pytest.mark.parametrize("theta", [0.3, Q, 1.2])
def test_product_vs_general_form_comparable(theta):
    V = ConeUnion.single((0.0, 1.0), theta)
    p = ModelParams(1.0)
    lo1, hi1 = _product_ratio_bounds(V.cones[0], V, p, 1)
    lo2, hi2 = _product_ratio_bounds(V.cones[0], V, p, 2)
    assert 0 < lo1 and hi1 < np.inf
    C1, C2 = max(hi1, 1 / lo1), max(hi2, 1 / lo2)
    assert abs(C1 - C2) <= 0.1 * C1


def test_green_envelope():
    p = ModelParams(1.0)
    assert green_envelope((0, 0), (1, 0), p) == 1.0
    assert green_envelope((0, 0), (2, 0), p) == pytest.approx(0.5)
    p = ModelParams(0.7)
    assert green_envelope((0, 0), (0, 6), p) / green_envelope((0, 0), (0, 3), p) == pytest.approx(2 ** (0.7 - 2))
    with pytest.raises(DomainError):
        green_envelope((1, 1), (1, 1), p)
