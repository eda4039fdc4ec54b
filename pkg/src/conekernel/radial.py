"""The radial profile ``g_alpha(w) = int_0^inf s exp(-s^alpha) cos(w s) ds``.

In polar frequency coordinates the radial part of the inverse Fourier
transform of ``exp(-B rho^alpha)`` reduces to ``B^{-2/alpha} g(a B^{-1/alpha})``.
``g`` is evaluated by rotating the contour ``s = e^{i gamma} u`` with
``gamma = pi / (2 (1 + alpha))``, which turns the oscillatory integral into an
exponentially damped one, then tabulated (values and derivatives) on a
``sinh``-spaced grid for cubic Hermite interpolation.  Beyond the grid the
expansion ``sum_k (-1)^k / k! Gamma(2 + k alpha) cos(pi (2 + k alpha) / 2)
w^{-2 - k alpha}`` is used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

# tanh-sinh nodes on tau in [-T, T]
_TS_T = 4.0
_TS_H = 1.0 / 48.0
_TAU = np.arange(-_TS_T, _TS_T + 0.5 * _TS_H, _TS_H)
_DECAY = 50.0


def _upper_limit(w: np.ndarray, alpha: float, kappa0: float) -> np.ndarray:
    # smallest v with kappa0 * (v + w v^{1/alpha}) >= _DECAY, by bisection
    lo = np.zeros_like(w)
    hi = np.full_like(w, _DECAY / kappa0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f = kappa0 * (mid + w * mid ** (1.0 / alpha)) - _DECAY
        lo = np.where(f < 0, mid, lo)
        hi = np.where(f < 0, hi, mid)
    return hi


def contour_moment(w, alpha: float, k: int) -> np.ndarray:
    """``H_k(w) = int_0^inf s^k exp(-s^alpha) exp(i w s) ds`` (complex, vectorised)."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    gam = math.pi / (2.0 * (1.0 + alpha))
    kappa0 = math.sin(gam)
    V = _upper_limit(w, alpha, kappa0)
    e = np.exp(-math.pi * np.sinh(_TAU))
    frac = 1.0 / (1.0 + e)
    dfrac = math.pi * np.cosh(_TAU) * e / (1.0 + e) ** 2
    out = np.empty(w.shape, dtype=complex)
    rot_a = complex(math.cos(alpha * gam), math.sin(alpha * gam))
    rot_1 = complex(math.cos(gam), math.sin(gam))
    p = (k + 1.0) / alpha - 1.0
    for start in range(0, w.size, 2048):
        sl = slice(start, start + 2048)
        v = V[sl, None] * frac[None, :]
        dv = V[sl, None] * dfrac[None, :]
        with np.errstate(under="ignore", invalid="ignore"):
            f = v ** p * np.exp(-rot_a * v + 1j * w[sl, None] * rot_1 * v ** (1.0 / alpha))
            f = np.where(v > 0, f, 0.0)
        out[sl] = (f * dv).sum(axis=1) * (_TS_H / alpha)
    return out * complex(math.cos((k + 1) * gam), math.sin((k + 1) * gam))


def g_direct(w, alpha: float) -> np.ndarray:
    """``g_alpha(w)`` by contour quadrature (no table)."""
    return contour_moment(w, alpha, 1).real


def dg_direct(w, alpha: float) -> np.ndarray:
    """``g_alpha'(w) = -Im H_2(w)``."""
    return -contour_moment(w, alpha, 2).imag


def _series_coeffs(alpha: float, kmax: int = 400):
    k = np.arange(kmax)
    ex = 2.0 + k * alpha
    logmag = special.gammaln(ex) - special.gammaln(k + 1.0)
    sign = np.where(k % 2 == 0, 1.0, -1.0) * np.cos(0.5 * math.pi * ex)
    return ex, sign, logmag


def g_series(w, alpha: float, deriv: bool = False) -> np.ndarray:
    """Large-``w`` expansion of ``g`` (or ``g'``), truncated at its smallest term.

    The truncation point is chosen on the magnitude envelope
    ``Gamma(2 + k alpha) / k! w^{-k alpha}`` so that isolated zeros of the
    cosine factor do not stop the sum early.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    ex, sign, logmag = _series_coeffs(alpha)
    if deriv:
        sign = -sign
        logmag = logmag + np.log(ex)
        ex = ex + 1.0
    lw = np.log(w)
    logterm = logmag[None, :] - ex[None, :] * lw[:, None]
    growing = np.diff(logterm, axis=1) > 0
    first_growth = np.where(growing.any(axis=1), growing.argmax(axis=1) + 1, logterm.shape[1])
    keep = np.arange(logterm.shape[1])[None, :] < first_growth[:, None]
    keep &= logterm > -745.0
    terms = np.where(keep, sign[None, :] * np.exp(np.where(keep, logterm, 0.0)), 0.0)
    return terms.sum(axis=1)


@dataclass(frozen=True)
class RadialTable:
    """Hermite table for ``g_alpha`` on ``w_j = scale * sinh(j * step)``."""

    alpha: float
    scale: float
    step: float
    w_max: float
    values: np.ndarray
    derivs: np.ndarray

    def __call__(self, w) -> np.ndarray:
        return radial_profile(self, w)


def radial_profile(tab: RadialTable, w) -> np.ndarray:
    """Evaluate ``g_alpha(|w|)`` from the table (numpy, vectorised)."""
    w = np.abs(np.asarray(w, dtype=float))
    if tab.alpha == 1.0:
        w2 = w * w
        return (1.0 - w2) / (1.0 + w2) ** 2
    out = np.empty_like(w)
    big = w >= tab.w_max
    if np.any(big):
        out[big] = g_series(w[big], tab.alpha)
    small = ~big
    if np.any(small):
        ws = w[small]
        pos = np.arcsinh(ws / tab.scale) / tab.step
        j = np.minimum(pos.astype(np.int64), tab.values.size - 2)
        w0 = tab.scale * np.sinh(j * tab.step)
        w1 = tab.scale * np.sinh((j + 1) * tab.step)
        hh = w1 - w0
        s = (ws - w0) / hh
        s2 = s * s
        s3 = s2 * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        out[small] = (h00 * tab.values[j] + h10 * hh * tab.derivs[j]
                      + h01 * tab.values[j + 1] + h11 * hh * tab.derivs[j + 1])
    return out


_SWITCH_CANDIDATES = (2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 60.0)


def series_switch_point(alpha: float) -> float:
    """Smallest candidate ``w`` where the large-``w`` expansion is at full precision.

    Accepted when the smallest retained term is below ``1e-16`` of the sum and
    no term exceeds ten times the sum (no cancellation).
    """
    ex, _, logmag = _series_coeffs(alpha)
    for w in _SWITCH_CANDIDATES:
        lt = logmag - ex * math.log(w)
        grow = np.diff(lt) > 0
        k = int(grow.argmax()) if grow.any() else lt.size - 1
        total = abs(float(g_series([w], alpha)[0]))
        if total == 0.0:
            continue
        lt = lt[: k + 1] - math.log(total)
        if lt.min() < math.log(1e-16) and lt.max() < math.log(10.0):
            return w
    return _SWITCH_CANDIDATES[-1]


@lru_cache(maxsize=16)
def radial_table(alpha: float, step: float = 2e-3, w_max: float | None = None) -> RadialTable:
    """Build (and cache) the Hermite table for ``g_alpha`` on ``[0, w_max]``.

    By default ``w_max`` is :func:`series_switch_point`, so the table only
    covers the range where the expansion would lose accuracy.
    """
    alpha = float(alpha)
    if w_max is None:
        w_max = 60.0 if alpha == 1.0 else series_switch_point(alpha)
    # mean of s under s exp(-s^alpha) sets the width of g near 0
    mean_s = math.exp(special.gammaln(3.0 / alpha) - special.gammaln(2.0 / alpha))
    scale = 0.05 / mean_s
    n = int(math.ceil(math.asinh(w_max / scale) / step)) + 1
    nodes = scale * np.sinh(np.arange(n + 1) * step)
    if alpha == 1.0:
        w2 = nodes * nodes
        vals = (1.0 - w2) / (1.0 + w2) ** 2
        ders = (2.0 * nodes * (w2 - 3.0)) / (1.0 + w2) ** 3
    else:
        vals = g_direct(nodes, alpha)
        ders = dg_direct(nodes, alpha)
    vals.flags.writeable = False
    ders.flags.writeable = False
    return RadialTable(alpha, scale, step, float(nodes[-1]), vals, ders)
