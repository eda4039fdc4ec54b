"""Lévy-measure analytics for ``nu(dz) = 1_V(z) |z|^{-d-alpha} dz``.

Polar form: ``nu = sigma(du) x r^{-1-alpha} dr`` where ``sigma`` is surface
measure restricted to ``V`` on the unit sphere.  In two dimensions everything
reduces to unions of arcs and is computed exactly; for ``d >= 3`` overlapping
caps fall back to randomised quasi-Monte Carlo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.stats import qmc

from .errors import DomainError
from .geometry import ConeUnion, contains_many

TWO_PI = 2.0 * math.pi


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere ``S^{d-1}`` in ``R^d``."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _sin_power_integral(theta: float, n: int) -> float:
    # int_0^theta sin^n(psi) dpsi for theta in [0, pi/2]
    if n == 0:
        return theta
    a = 0.5 * (n + 1)
    return 0.5 * special.betainc(a, 0.5, math.sin(theta) ** 2) * special.beta(a, 0.5)


def cap_surface_measure(aperture: float, d: int) -> float:
    """Surface measure of ``Gamma(., aperture) ∩ S^{d-1}`` (both nappes)."""
    th = float(aperture)
    if not (0.0 < th <= math.pi / 2):
        raise DomainError(f"aperture must lie in (0, pi/2], got {th!r}")
    if d < 2:
        raise DomainError("dimension must be >= 2")
    if d == 2:
        return 4.0 * th
    return 2.0 * sphere_area(d - 1) * _sin_power_integral(th, d - 2)


# ----------------------------------------------------------------------------
# arcs (d = 2)


def cone_arcs(V: ConeUnion) -> np.ndarray:
    """Disjoint, sorted arcs ``[a, b]`` within ``[0, 2 pi)`` covering ``V ∩ S^1``."""
    if V.dimension != 2:
        raise DomainError("arcs are only defined for d = 2")
    raw = []
    for c in V.cones:
        a = math.atan2(c.axis[1], c.axis[0])
        for centre in (a, a + math.pi):
            lo = (centre - c.aperture) % TWO_PI
            hi = lo + 2 * c.aperture
            if hi > TWO_PI:
                raw.append((lo, TWO_PI))
                raw.append((0.0, hi - TWO_PI))
            else:
                raw.append((lo, hi))
    raw.sort()
    merged: list[list[float]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return np.array(merged, dtype=float)


def _abs_cos_power_primitive(psi, alpha: float):
    """``F(psi) = int_0^psi |cos v|^alpha dv`` for any real ``psi`` (vectorised)."""
    psi = np.asarray(psi, dtype=float)
    half = 0.5 * (alpha + 1.0)
    period = special.beta(0.5, half)
    sgn = np.sign(psi)
    p = np.abs(psi)
    k = np.floor(p / math.pi)
    r = p - k * math.pi
    first = r <= math.pi / 2
    rr = np.where(first, r, math.pi - r)
    g = 0.5 * special.betainc(0.5, half, np.sin(rr) ** 2) * period
    g = np.where(first, g, period - g)
    return sgn * (k * period + g)


def angular_factor_2d(beta, V: ConeUnion, alpha: float):
    """``int_{V ∩ S^1} |cos(beta - u)|^alpha du`` for direction angles ``beta``."""
    arcs = cone_arcs(V)
    beta = np.asarray(beta, dtype=float)
    out = np.zeros_like(beta)
    for lo, hi in arcs:
        out = out + (_abs_cos_power_primitive(hi - beta, alpha)
                     - _abs_cos_power_primitive(lo - beta, alpha))
    return out


def angular_kinks_2d(V: ConeUnion) -> np.ndarray:
    """Directions in ``[0, pi)`` where ``beta -> angular_factor_2d`` is not smooth."""
    arcs = cone_arcs(V)
    ends = set()
    for lo, hi in arcs:
        if hi - lo >= TWO_PI - 1e-15:
            continue
        for e in (lo, hi):
            ends.add(round((e + math.pi / 2) % math.pi, 15))
    return np.array(sorted(ends))


# ----------------------------------------------------------------------------
# QMC sphere sampling (d >= 3)


@lru_cache(maxsize=32)
def _qmc_directions(d: int, m: int, seed: int, rep: int) -> np.ndarray:
    eng = qmc.Sobol(d, scramble=True, seed=np.random.default_rng([seed, rep]))
    u = eng.random_base2(m)
    u = np.clip(u, 1e-16, 1 - 1e-16)
    g = special.ndtri(u)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class SpectralMeasure:
    """Surface measure of ``V ∩ S^{d-1}``.

    ``overlap_estimate`` is the multiply-covered measure ``sum(cap_masses) -
    total_mass``; ``standard_error`` is 0 when the total was computed exactly.
    """

    total_mass: float
    cap_masses: tuple[float, ...]
    overlap_estimate: float
    standard_error: float
    method: str


def _cap_centres_separation(a1, a2) -> float:
    # smallest angle between the lines spanned by two unit axes
    return math.acos(min(1.0, abs(float(np.dot(a1, a2)))))


def union_surface_measure(V: ConeUnion, qmc_points_log2: int = 15,
                          qmc_replicates: int = 16, seed: int = 0) -> SpectralMeasure:
    """Total surface measure of ``V`` on the sphere with per-cone cap masses."""
    d = V.dimension
    caps = tuple(cap_surface_measure(c.aperture, d) for c in V.cones)
    if d == 2:
        arcs = cone_arcs(V)
        total = float(np.sum(arcs[:, 1] - arcs[:, 0]))
        return SpectralMeasure(total, caps, sum(caps) - total, 0.0, "arcs")

    # drop caps contained in another one, then test pairwise disjointness
    keep: list[int] = []
    order = sorted(range(len(V.cones)), key=lambda i: -V.cones[i].aperture)
    for i in order:
        ci = V.cones[i]
        inside = False
        for j in keep:
            cj = V.cones[j]
            if _cap_centres_separation(ci.axis_array, cj.axis_array) + ci.aperture <= cj.aperture + 1e-15:
                inside = True
                break
        if not inside:
            keep.append(i)
    disjoint = all(
        _cap_centres_separation(V.cones[i].axis_array, V.cones[j].axis_array)
        >= V.cones[i].aperture + V.cones[j].aperture
        for k, i in enumerate(keep) for j in keep[k + 1:]
    )
    if disjoint:
        total = sum(caps[i] for i in keep)
        return SpectralMeasure(total, caps, sum(caps) - total, 0.0, "exact")

    area = sphere_area(d)
    ests = []
    for rep in range(qmc_replicates):
        U = _qmc_directions(d, qmc_points_log2, seed, rep)
        ests.append(area * float(np.mean(contains_many(V, U))))
    ests = np.array(ests)
    total = float(ests.mean())
    se = float(ests.std(ddof=1) / math.sqrt(len(ests)))
    return SpectralMeasure(total, caps, sum(caps) - total, se, "qmc")


def tail_mass(V: ConeUnion, alpha: float, delta: float) -> float:
    """``nu({|z| > delta}) = sigma(V ∩ S^{d-1}) delta^{-alpha} / alpha``."""
    _check_alpha(alpha)
    delta = float(delta)
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    return union_surface_measure(V).total_mass * delta ** (-alpha) / alpha


def _check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not (0.0 < a < 2.0):
        raise DomainError(f"alpha must lie in (0, 2), got {a!r}")
    return a


# ----------------------------------------------------------------------------
# the radial constant  c_alpha = int_0^inf (1 - cos s) s^{-1-alpha} ds

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


def _gauss(f, a: float, b: float) -> float:
    x = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    return 0.5 * (b - a) * float(np.dot(_GL_W, f(x)))


@lru_cache(maxsize=256)
def radial_constant(alpha: float) -> float:
    """``c_alpha = int_0^inf (1 - cos s) s^{-1-alpha} ds`` by quadrature.

    The head ``[0, pi]`` is integrated on geometrically graded panels (the
    integrand behaves like ``s^{1-alpha}/2`` at 0).  The tail splits into
    ``int s^{-1-alpha}`` (exact) minus the cosine part, which is summed over
    half-periods between consecutive zeros of ``cos`` and accelerated by
    repeated averaging of partial sums.
    """
    a = _check_alpha(alpha)

    def head_f(s):
        # 1 - cos s = 2 sin^2(s/2), stable near 0
        return 2.0 * np.sin(0.5 * s) ** 2 * s ** (-1.0 - a)

    edges = [math.pi * 2.0 ** (-k) for k in range(60, -1, -1)]
    eps = edges[0]
    # series of 1 - cos on [0, eps]
    first = eps ** (2 - a) / (2 * (2 - a)) - eps ** (4 - a) / (24 * (4 - a))
    head = math.fsum([first] + [_gauss(head_f, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])

    def cos_f(s):
        return np.cos(s) * s ** (-1.0 - a)

    terms = [_gauss(cos_f, math.pi, 1.5 * math.pi)]
    for k in range(1, 80):
        lo = (k + 0.5) * math.pi
        terms.append(_gauss(cos_f, lo, lo + math.pi))
    partial = np.cumsum(terms)
    avg = partial[-40:]
    while avg.size > 1:
        avg = 0.5 * (avg[1:] + avg[:-1])
    cos_tail = float(avg[0])
    return head + math.pi ** (-a) / a - cos_tail


# ----------------------------------------------------------------------------
# characteristic exponent


def angular_factor(directions, V: ConeUnion, alpha: float,
                   qmc_points_log2: int = 16, seed: int = 0) -> np.ndarray:
    """``Phi(u) = int_{V ∩ S^{d-1}} |u . v|^alpha sigma(dv)`` for unit rows ``u``."""
    U = np.atleast_2d(np.asarray(directions, float))
    if V.dimension == 2:
        beta = np.arctan2(U[:, 1], U[:, 0])
        return angular_factor_2d(beta, V, alpha)
    D = _qmc_directions(V.dimension, qmc_points_log2, seed, 0)
    D = D[contains_many(V, D)]
    w = sphere_area(V.dimension) / (2 ** qmc_points_log2)
    return w * np.sum(np.abs(U @ D.T) ** alpha, axis=1)


def char_exponent(xi, V: ConeUnion, alpha: float) -> float:
    """``phi(xi) = int_V (1 - cos(xi . z)) |z|^{-d-alpha} dz`` via the polar form."""
    a = _check_alpha(alpha)
    x = np.asarray(xi, float).reshape(-1)
    if x.size != V.dimension:
        raise DomainError(f"xi must have {V.dimension} components")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return 0.0
    return radial_constant(a) * r ** a * float(angular_factor(x / r, V, a)[0])


def char_exponent_many(Xi, V: ConeUnion, alpha: float) -> np.ndarray:
    a = _check_alpha(alpha)
    X = np.atleast_2d(np.asarray(Xi, float))
    r = np.linalg.norm(X, axis=1)
    safe = np.where(r > 0, r, 1.0)
    phi = radial_constant(a) * r ** a * angular_factor(X / safe[:, None], V, a)
    return np.where(r > 0, phi, 0.0)


def lower_bound_constant(V: ConeUnion, alpha: float, n_directions: int = 1000,
                         seed: int = 0) -> float:
    """``min_u phi(u)`` over unit directions; ``phi(xi) >= c |xi|^alpha``.

    For ``d = 2`` the minimum is taken over an equispaced grid of
    ``n_directions`` angles together with the kinks of the angular factor.
    """
    a = _check_alpha(alpha)
    if V.dimension == 2:
        beta = np.concatenate([np.linspace(0.0, math.pi, n_directions, endpoint=False),
                               angular_kinks_2d(V)])
        return radial_constant(a) * float(angular_factor_2d(beta, V, a).min())
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_directions, V.dimension))
    U = g / np.linalg.norm(g, axis=1, keepdims=True)
    return radial_constant(a) * float(angular_factor(U, V, a).min())


def small_jump_covariance(V: ConeUnion, alpha: float, delta: float) -> np.ndarray:
    """``int_{V, |z| <= delta} z z^T nu(dz)``, the covariance rate of dropped jumps."""
    a = _check_alpha(alpha)
    radial = float(delta) ** (2.0 - a) / (2.0 - a)
    d = V.dimension
    if d == 2:
        M = np.zeros((2, 2))
        for lo, hi in cone_arcs(V):
            M[0, 0] += 0.5 * (hi - lo) + 0.25 * (math.sin(2 * hi) - math.sin(2 * lo))
            M[1, 1] += 0.5 * (hi - lo) - 0.25 * (math.sin(2 * hi) - math.sin(2 * lo))
            M[0, 1] += 0.5 * (math.sin(hi) ** 2 - math.sin(lo) ** 2)
        M[1, 0] = M[0, 1]
        return radial * M
    D = _qmc_directions(d, 16, 0, 0)
    D = D[contains_many(V, D)]
    w = sphere_area(d) / (2 ** 16)
    return radial * w * (D.T @ D)
