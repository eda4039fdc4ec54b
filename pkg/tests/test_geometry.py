import math

import numpy as np
import pytest

from conekernel import DomainError
from conekernel.geometry import (
    ConeUnion,
    SymmetricCone,
    cone_contains,
    contains_many,
    dist_to_cone,
    dist_to_union,
    dist_to_union_many,
    max_distance_direction,
    meeting_legs,
    meeting_points,
    nearest_cone,
    union_contains,
)

from oracles import brute_dist_to_cone, brute_meeting

Q = math.pi / 4


@pytest.mark.parametrize("d", [2, 3, 5])
def test_membership_examples(d):
    e = np.eye(d)
    c = SymmetricCone(tuple(e[0]), Q)
    assert cone_contains(c, e[0])
    assert cone_contains(c, -e[0])
    assert not cone_contains(c, e[1])


def test_union_membership_examples():
    V = ConeUnion.from_specs([((1, 0), math.pi / 8), ((0, 1), math.pi / 8)])
    assert union_contains(V, (0, 1))
    assert not union_contains(ConeUnion.single((1, 0), math.pi / 8), (1, 1))


def test_boundary_is_excluded():
    c = SymmetricCone((1.0, 0.0), Q)
    assert not cone_contains(c, (1.0, 1.0))
    assert cone_contains(c, (1.0, 1.0 - 1e-9))


def test_zero_vector_rejected():
    with pytest.raises(DomainError):
        cone_contains(SymmetricCone((1.0, 0.0), Q), (0.0, 0.0))
    with pytest.raises(DomainError):
        union_contains(ConeUnion.single((1, 0), Q), (0.0, 0.0))


@pytest.mark.parametrize("axis, ap", [((0, 0), Q), ((1, 0), 0.0), ((1, 0), 1.6), ((1,), Q)])
def test_invalid_cones(axis, ap):
    with pytest.raises(DomainError):
        SymmetricCone(axis, ap)


def test_axis_is_normalised():
    c = SymmetricCone((3.0, 4.0), Q)
    assert abs(np.linalg.norm(c.axis_array) - 1.0) < 1e-12


def test_contains_many_matches_scalar(rng):
    V = ConeUnion.from_specs([((1, 0, 0), 0.3), ((1, 1, 1), 0.5)])
    Z = rng.standard_normal((500, 3))
    assert np.array_equal(contains_many(V, Z), [union_contains(V, z) for z in Z])


def test_dist_examples():
    assert dist_to_cone(SymmetricCone((1, 0), Q), (2.0, 0.0)) == 0.0
    d = dist_to_cone(SymmetricCone((0, 1), Q), (2.0, 0.0))
    assert abs(d - math.sqrt(2)) < 1e-12
    # frozen from the dense-sampling oracle
    assert abs(d - brute_dist_to_cone((0, 1), Q, np.array([2.0, 0.0]))) < 1e-6
    assert abs(dist_to_union(ConeUnion.single((0, 1), Q), (2.0, 0.0)) - math.sqrt(2)) < 1e-12
    assert dist_to_cone(SymmetricCone((1, 0), Q), (0.0, 0.0)) == 0.0


def test_dist_against_dense_sampling(rng):
    for _ in range(30):
        ax = rng.standard_normal(2)
        ap = rng.uniform(0.05, math.pi / 2)
        w = rng.standard_normal(2) * 3
        got = dist_to_cone(SymmetricCone(tuple(ax), ap), w)
        # sampling step of the oracle bounds its own error by |w| * step / 2
        step = 2 * ap / 200000
        assert abs(got - brute_dist_to_cone(ax, ap, w)) < 1e-9 + np.linalg.norm(w) * step


def test_dist_union_is_min(rng):
    V = ConeUnion.from_specs([((1, 0), 0.2), ((1, 2), 0.4)])
    for w in rng.standard_normal((50, 2)):
        d = dist_to_union(V, w)
        assert d <= min(dist_to_cone(c, w) for c in V.cones) + 1e-15
        assert d == pytest.approx(min(dist_to_cone(c, w) for c in V.cones), abs=0)
        assert dist_to_cone(nearest_cone(V, w), w) == d
    W = rng.standard_normal((50, 2))
    assert np.allclose(dist_to_union_many(V, W), [dist_to_union(V, w) for w in W], rtol=1e-14)


def test_half_space_cone_distance_zero(rng):
    c = SymmetricCone((1.0, 0.0), math.pi / 2)
    for w in rng.standard_normal((20, 2)):
        assert dist_to_cone(c, w) == 0.0


def test_meeting_example():
    ms = meeting_points(SymmetricCone((0, 1), Q), (0, 0), (2, 0))
    pts = sorted(map(tuple, np.round(np.array(ms.points), 12)))
    assert pts == [(1.0, -1.0), (1.0, 1.0)]
    assert abs(ms.min_sum - 2 * math.sqrt(2)) < 1e-12
    best, _ = brute_meeting((0, 1), Q, (0, 0), (2, 0))
    assert abs(best - 2 * math.sqrt(2)) < 1e-4
    assert abs(ms.legs((0, 0), (2, 0))[0] - math.sqrt(2)) < 1e-12


def test_meeting_direct_case():
    ms = meeting_points(SymmetricCone((1, 0), Q), (0, 0), (3, 1))
    assert ms.direct
    assert np.allclose(ms.points[0], (0, 0)) and np.allclose(ms.points[1], (3, 1))
    assert ms.min_sum == pytest.approx(math.hypot(3, 1))


def test_meeting_on_boundary_is_direct():
    ms = meeting_points(SymmetricCone((1, 0), Q), (0, 0), (1, 1))
    assert ms.direct
    assert ms.min_sum == pytest.approx(math.sqrt(2))


def test_meeting_same_point_rejected():
    with pytest.raises(DomainError):
        meeting_points(SymmetricCone((1, 0), Q), (1, 1), (1, 1))


def test_meeting_against_brute_force(rng):
    for _ in range(40):
        ax = rng.standard_normal(2)
        ap = rng.uniform(0.1, 1.4)
        x, y = rng.uniform(-2, 2, (2, 2))
        ms = meeting_points(SymmetricCone(tuple(ax), ap), x, y)
        best, arg = brute_meeting(ax, ap, x, y)
        assert abs(ms.min_sum - best) < 1e-4 * max(1.0, best)
        if not ms.direct:
            assert min(np.linalg.norm(arg - p) for p in ms.points) < 1e-3 * max(1.0, best)


def test_meeting_in_three_dimensions_beats_random_feasible_points(rng):
    c = SymmetricCone((0.0, 0.0, 1.0), 0.5)
    x = np.zeros(3)
    y = np.array([2.0, 0.5, 0.1])
    ms = meeting_points(c, x, y)
    assert not ms.direct
    Z = rng.uniform(-6, 6, (200000, 3))
    ok = contains_many(ConeUnion((3), (c,)), Z - x) & contains_many(ConeUnion(3, (c,)), Z - y)
    f = np.linalg.norm(Z[ok] - x, axis=1) + np.linalg.norm(Z[ok] - y, axis=1)
    assert ms.min_sum <= f.min() + 1e-12
    z, zb = ms.points
    assert abs(np.linalg.norm(x - z) - np.linalg.norm(y - zb)) < 1e-9


def test_sandwich_and_pi_over_4_equality(rng):
    for th in (0.3, Q, 1.2):
        c = SymmetricCone((0.0, 1.0), th)
        for _ in range(200):
            x, y = rng.uniform(-3, 3, (2, 2))
            if cone_contains(c, y - x) or np.allclose(x, y):
                continue
            big, small = meeting_legs(c, x, y)
            dist = dist_to_cone(c, y - x)
            assert dist <= small + 1e-12
            if th == Q:
                assert abs(dist - small) < 1e-9
            r = np.linalg.norm(y - x)
            assert r <= 2 * big + 1e-12


def test_min_leg_monotone_in_aperture(rng):
    for _ in range(100):
        x, y = rng.uniform(-3, 3, (2, 2))
        legs = []
        for th in (0.2, 0.5, 0.9, 1.3):
            c = SymmetricCone((0.0, 1.0), th)
            legs.append(0.0 if cone_contains(c, y - x) else meeting_legs(c, x, y)[1])
        assert all(b <= a + 1e-12 for a, b in zip(legs, legs[1:]))


def test_max_distance_direction():
    V = ConeUnion.single((1, 0), Q)
    u = max_distance_direction(V)
    assert abs(abs(u[1]) - 1.0) < 1e-9
    assert dist_to_union(V, u) == pytest.approx(math.sqrt(2) / 2, abs=1e-9)


def test_distance_bounded_by_norm_constant():
    V = ConeUnion.from_specs([((1, 0, 0), 0.2), ((0, 1, 0), 0.3)])
    rs = []
    for seed in (0, 1):
        g = np.random.default_rng(seed).standard_normal((100000, 3))
        W = g / np.linalg.norm(g, axis=1, keepdims=True)
        rs.append(dist_to_union_many(V, W).max())
    assert rs[0] <= 1.0 and abs(rs[0] - rs[1]) < 1e-3
