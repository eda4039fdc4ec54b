import math

import numpy as np
import pytest
from scipy import integrate

from conekernel.radial import (
    dg_direct,
    g_direct,
    g_series,
    radial_table,
    series_switch_point,
)


def g_ref(w, alpha):
    """``int_0^S s exp(-s^alpha) cos(w s) ds`` with QUADPACK's cosine-weighted rule.

    ``S`` is where the integrand drops below ``1e-20``; the rest is negligible.
    """
    f = lambda s: s * math.exp(-s ** alpha)  # noqa: E731
    S = (50.0 + 2 * math.log(50.0 ** (1 / alpha))) ** (1 / alpha)
    edges = np.concatenate([[0.0], np.geomspace(1e-3, S, 40)])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, a, b, weight="cos", wvar=w, epsabs=1e-15, epsrel=1e-12, limit=500)[0]
    return total


def test_closed_form_alpha_one():
    w = np.array([0.0, 0.3, 1.0, 4.0, 50.0])
    assert np.allclose(g_direct(w, 1.0), (1 - w ** 2) / (1 + w ** 2) ** 2, rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.3, 1.5, 1.9])
@pytest.mark.parametrize("w", [0.0, 0.2, 1.0, 3.0, 7.0])
def test_direct_against_quadpack(alpha, w):
    ref = g_ref(w, alpha)
    assert abs(g_direct(np.array([w]), alpha)[0] - ref) < 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_derivative_by_finite_difference(alpha):
    w = np.array([0.4, 1.7, 5.0])
    h = 1e-5
    fd = (g_direct(w + h, alpha) - g_direct(w - h, alpha)) / (2 * h)
    assert np.allclose(dg_direct(w, alpha), fd, rtol=1e-6, atol=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 0.9, 1.5])
def test_series_matches_direct_at_switch(alpha):
    w0 = series_switch_point(alpha)
    w = np.array([w0, 1.5 * w0, 3 * w0])
    assert np.allclose(g_series(w, alpha), g_direct(w, alpha), rtol=1e-9, atol=0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_table_interpolation(alpha):
    tab = radial_table(alpha)
    w = np.concatenate([np.geomspace(1e-3, tab.w_max * 0.999, 300), [tab.w_max * 2, tab.w_max * 10]])
    exact = g_direct(w, alpha)
    scale = np.maximum(np.abs(exact), 1e-12)
    assert np.max(np.abs(tab(w) - exact) / scale) < 1e-8
    assert tab(np.array([-0.7]))[0] == pytest.approx(tab(np.array([0.7]))[0], rel=0, abs=0)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_g_zero_is_gamma(alpha):
    assert g_direct(np.array([0.0]), alpha)[0] == pytest.approx(math.gamma(2 / alpha) / alpha, rel=1e-12)
