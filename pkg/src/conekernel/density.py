"""Fourier-inversion density oracle for the Lévy case ``J = J^alpha`` in ``d = 2``.

With ``xi = rho (cos b, sin b)`` the exponent factorises as
``t phi(xi) = B(b) rho^alpha`` where ``B(b) = t c_alpha Phi(b)``, so

    q(t, x) = (2 pi)^{-2} int_0^{2 pi} B^{-2/alpha} g(x . u_b B^{-1/alpha}) db

with ``g`` from :mod:`conekernel.radial`.  The radial integral is therefore
done to infinity without truncation; only the angular integral is numerical.
The angular integrand is smooth except at the kinks of ``Phi`` and has a peak
of width ``B^{1/alpha} / |x|`` around the direction orthogonal to ``x``.
Panels are graded geometrically towards both, and each panel is integrated
with a 12- and a 24-point Gauss-Legendre rule; their difference is the error
estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, QuadratureError, UnsupportedDimensionError
from .geometry import ConeUnion
from .levy import (
    _check_alpha,
    angular_factor_2d,
    angular_kinks_2d,
    cone_arcs,
    lower_bound_constant,
    radial_constant,
)
from .radial import RadialTable, radial_table

GL_LO = np.polynomial.legendre.leggauss(12)
GL_HI = np.polynomial.legendre.leggauss(24)

PEAK_RATIO = 2.0
KINK_SCALE = 1e-4
KINK_FLOOR = 1e-8
KINK_REL = 1e-4
KINK_RATIO = 4.0
CLAMP_FACTOR = 1e-8


@dataclass(frozen=True)
class AngularTable:
    """Cubic Hermite table of ``Phi(b)`` on ``n + 1`` equispaced nodes of ``[0, pi]``."""

    alpha: float
    values: np.ndarray
    derivs: np.ndarray
    kinks: np.ndarray

    @property
    def step(self) -> float:
        return math.pi / (self.values.size - 1)

    def __call__(self, beta) -> np.ndarray:
        b = np.mod(np.asarray(beta, float), math.pi)
        h = self.step
        j = np.minimum((b / h).astype(np.int64), self.values.size - 2)
        s = b / h - j
        s2, s3 = s * s, s * s * s
        return ((2 * s3 - 3 * s2 + 1) * self.values[j] + (s3 - 2 * s2 + s) * h * self.derivs[j]
                + (-2 * s3 + 3 * s2) * self.values[j + 1] + (s3 - s2) * h * self.derivs[j + 1])


def _cone_key(V: ConeUnion):
    return (V.dimension, tuple((c.axis, c.aperture) for c in V.cones))


@lru_cache(maxsize=32)
def _angular_table(key, alpha: float, n: int) -> AngularTable:
    d, cones = key
    V = ConeUnion.from_specs(cones, d)
    beta = np.linspace(0.0, math.pi, n + 1)
    vals = angular_factor_2d(beta, V, alpha)
    der = np.zeros_like(beta)
    for lo, hi in cone_arcs(V):
        der += np.abs(np.cos(beta - lo)) ** alpha - np.abs(np.cos(beta - hi)) ** alpha
    for a in (vals, der):
        a.flags.writeable = False
    kinks = angular_kinks_2d(V)
    kinks.flags.writeable = False
    return AngularTable(alpha, vals, der, kinks)


def angular_table(V: ConeUnion, alpha: float, n: int = 1 << 16) -> AngularTable:
    return _angular_table(_cone_key(V), float(alpha), n)


def _require_2d(V: ConeUnion):
    if V.dimension != 2:
        raise UnsupportedDimensionError(
            f"the Fourier oracle is implemented for d = 2 only (got d = {V.dimension})")


# ----------------------------------------------------------------------------
# panels


def _graded(points: list, centre: float, scale: float, ratio: float, lo: float, hi: float):
    points.append(centre)
    s = scale
    while s < hi - lo:
        points.append(centre - s)
        points.append(centre + s)
        s *= ratio


def angular_breakpoints(x: np.ndarray, alpha: float, ang: AngularTable,
                        t_coef: float) -> tuple[float, np.ndarray]:
    """Return ``(beta_p, edges)`` with panel edges in ``[-pi/2, pi/2]`` relative to ``beta_p``.

    ``beta_p`` is the direction orthogonal to ``x`` (0 for ``x = 0``).
    """
    rho = math.hypot(x[0], x[1])
    half = 0.5 * math.pi
    pts = [-half, half]
    kscale = KINK_SCALE
    if rho > 0.0:
        beta_p = math.atan2(x[1], x[0]) + half
        width = (t_coef * float(ang(beta_p))) ** (1.0 / alpha) / rho
        if width < half:
            _graded(pts, 0.0, width, PEAK_RATIO, -half, half)
        # a narrow peak means a small density, so kink errors need finer panels
        kscale = min(KINK_SCALE, max(KINK_FLOOR, KINK_REL * width))
    else:
        beta_p = 0.0
    for k in ang.kinks:
        rel = (k - beta_p + half) % math.pi - half
        _graded(pts, rel, kscale, KINK_RATIO, -half, half)
    e = np.unique(np.clip(np.array(pts), -half, half))
    e = e[np.concatenate([[True], np.diff(e) > 1e-13])]
    e[0], e[-1] = -half, half
    return beta_p, e


def _panel_nodes(edges: np.ndarray, rule) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = rule
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * xg[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * wg[None, :]
    return nodes.ravel(), weights.ravel()


def _integrand(rel, beta_p, x, alpha, ang, rtab, t_coef):
    beta = beta_p + rel
    B = t_coef * ang(beta)
    s = B ** (-1.0 / alpha)
    a0 = (x[0] * np.cos(beta) + x[1] * np.sin(beta)) * s
    return s * s * rtab(a0)


def density_point_numpy(x, alpha: float, ang: AngularTable, rtab: RadialTable,
                        t_coef: float) -> tuple[float, float]:
    """``(q, error_estimate)`` at one point, pure numpy."""
    x = np.asarray(x, float)
    beta_p, edges = angular_breakpoints(x, alpha, ang, t_coef)
    pref = 2.0 / (4.0 * math.pi ** 2)
    out = []
    for rule in (GL_HI, GL_LO):
        nodes, w = _panel_nodes(edges, rule)
        f = _integrand(nodes, beta_p, x, alpha, ang, rtab, t_coef)
        out.append(pref * float(np.dot(w, f)))
    return out[0], abs(out[0] - out[1])


# ----------------------------------------------------------------------------
# public API


@dataclass(frozen=True)
class DensityValue:
    """A single oracle value with its quadrature error estimate."""

    value: float
    error: float

    def __float__(self):
        return self.value


@dataclass
class DensityGrid:
    """Oracle values ``q(t, .)`` on a regular 2-D lattice (row-major, ``x2`` fastest)."""

    time: float
    x1: np.ndarray
    x2: np.ndarray
    values: np.ndarray
    quadrature_meta: dict = field(default_factory=dict)

    @property
    def cell_area(self) -> float:
        return float((self.x1[1] - self.x1[0]) * (self.x2[1] - self.x2[0]))

    @property
    def mass(self) -> float:
        """Lattice sum times cell area."""
        return float(self.values.sum() * self.cell_area)

    def points(self) -> np.ndarray:
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        return np.column_stack([X1.ravel(), X2.ravel()])

    def to_csv(self, path) -> None:
        P = self.points()
        with open(path, "w") as fh:
            fh.write("# schema: x1 float, x2 float, q float; row-major lattice, x2 fastest\n")
            fh.write("x1,x2,q\n")
            for (a, b), v in zip(P.tolist(), self.values.ravel().tolist()):
                fh.write(f"{a!r},{b!r},{v!r}\n")

    def meta_json(self) -> dict:
        m = dict(self.quadrature_meta)
        m.update(time=self.time, shape=list(self.values.shape), mass=self.mass,
                 cell_area=self.cell_area)
        return m


def _t_coef(t: float, alpha: float) -> float:
    return t * radial_constant(alpha)


def _check_t(t) -> float:
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t!r}")
    return t


def _clamp(values: np.ndarray, t: float, alpha: float) -> np.ndarray:
    floor = -CLAMP_FACTOR * t ** (-2.0 / alpha)
    bad = values < floor
    if np.any(bad):
        raise QuadratureError(
            f"{int(bad.sum())} oracle values below the ripple floor {floor:.3e} "
            f"(min {values.min():.3e})")
    return np.maximum(values, 0.0)


def frequency_cutoff(V: ConeUnion, t: float, alpha: float, tol: float) -> float:
    """Radius beyond which ``exp(-t phi(xi)) < tol`` (reported, not used to truncate)."""
    c = lower_bound_constant(V, alpha)
    return (math.log(1.0 / tol) / (t * c)) ** (1.0 / alpha)


def fourier_density(t, x, V: ConeUnion, alpha: float, tol: float = 1e-10) -> DensityValue:
    """Transition density ``q(t, x)`` of the Lévy process with measure ``1_V |z|^{-2-alpha}``.

    Raises
    ------
    UnsupportedDimensionError
        Unless ``d = 2``.
    QuadratureError
        If the value undershoots the negative ripple floor, or the error
        estimate exceeds ``tol`` relative to ``q(t, 0)``.
    """
    _require_2d(V)
    t = _check_t(t)
    a = _check_alpha(alpha)
    vals, errs = _evaluate(t, np.atleast_2d(np.asarray(x, float)), V, a)
    scale = t ** (-2.0 / a)
    if errs[0] > max(tol, 1e-13) * scale * 1e3:
        raise QuadratureError(f"angular quadrature error {errs[0]:.3e} too large")
    return DensityValue(float(_clamp(vals, t, a)[0]), float(errs[0]))


def _evaluate(t: float, X: np.ndarray, V: ConeUnion, alpha: float, threads: int = 1):
    from . import _backend

    ang = angular_table(V, alpha)
    rtab = radial_table(alpha)
    return _backend.density_points(X, alpha, ang, rtab, _t_coef(t, alpha), threads)


def fourier_density_many(t, X, V: ConeUnion, alpha: float, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised oracle: ``(values, error_estimates)`` at the rows of ``X``."""
    _require_2d(V)
    t = _check_t(t)
    a = _check_alpha(alpha)
    vals, errs = _evaluate(t, np.atleast_2d(np.asarray(X, float)), V, a, threads)
    return _clamp(vals, t, a), errs


def density_grid(t, window, resolution: int, V: ConeUnion, alpha: float,
                 threads: int = 1, tol: float = 1e-10) -> DensityGrid:
    """Oracle values on a ``resolution x resolution`` cell-centred lattice.

    ``window`` is either a half-width ``L`` (square ``[-L, L]^2``) or a box
    ``((lo1, hi1), (lo2, hi2))``.
    """
    _require_2d(V)
    t = _check_t(t)
    a = _check_alpha(alpha)
    if np.ndim(window) == 0:
        L = float(window)
        box = ((-L, L), (-L, L))
    else:
        box = tuple(tuple(map(float, b)) for b in window)
    n = int(resolution)
    axes = []
    for lo, hi in box:
        h = (hi - lo) / n
        axes.append(lo + h * (np.arange(n) + 0.5))
    X1, X2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    P = np.column_stack([X1.ravel(), X2.ravel()])
    vals, errs = _evaluate(t, P, V, a, threads)
    vals = _clamp(vals, t, a)
    meta = {
        "method": "polar angular Gauss-Legendre with exact radial profile",
        "alpha": a,
        "window": [list(b) for b in box],
        "resolution": n,
        "freq_cutoff": frequency_cutoff(V, t, a, tol),
        "max_error_estimate": float(errs.max()),
        "cone_union": V.to_list(),
    }
    return DensityGrid(t, axes[0], axes[1], vals.reshape(n, n), meta)


def save_density_grid(grid: DensityGrid, csv_path) -> tuple[str, str]:
    """Write the lattice CSV and a JSON sidecar with the quadrature metadata."""
    import json
    from pathlib import Path

    csv_path = Path(csv_path)
    grid.to_csv(csv_path)
    meta_path = csv_path.with_suffix(".json")
    meta_path.write_text(json.dumps(grid.meta_json(), indent=2, sort_keys=True))
    return str(csv_path), str(meta_path)


def load_density_grid(csv_path) -> DensityGrid:
    """Inverse of :func:`save_density_grid`."""
    import json
    from pathlib import Path

    csv_path = Path(csv_path)
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    data = np.loadtxt(csv_path, delimiter=",", comments="#", skiprows=2, ndmin=2)
    n1, n2 = meta["shape"]
    x1 = data[::n2, 0].copy()
    x2 = data[:n2, 1].copy()
    keep = {k: v for k, v in meta.items() if k not in ("time", "shape", "mass", "cell_area")}
    return DensityGrid(float(meta["time"]), x1, x2, data[:, 2].reshape(n1, n2), keep)


def green_from_oracle(x, y, V: ConeUnion, alpha: float, tol: float = 1e-8) -> DensityValue:
    """``G(x, y) = int_0^inf q(t, y - x) dt``.

    With ``w = y - x`` and ``r = |w|`` the time integral is split at ``t = r^alpha``:

    * ``t < r^alpha``: ``r^{alpha - 2} int_0^1 q(s, w_hat) ds``, smooth in ``s``
      since ``q(s, w_hat)`` grows linearly from 0;
    * ``t > r^alpha``: with ``t = (r / u)^alpha`` and self-similarity this is
      ``alpha r^{alpha - 2} int_0^1 u^{1 - alpha} q(1, u w_hat) du``, done with
      an algebraic-weight rule for the ``u^{1 - alpha}`` factor.
    """
    from scipy import integrate

    from . import _backend

    _require_2d(V)
    a = _check_alpha(alpha)
    w = np.asarray(y, float).reshape(-1) - np.asarray(x, float).reshape(-1)
    if w.size != 2:
        raise DomainError("points must lie in R^2")
    r = float(np.hypot(w[0], w[1]))
    if r == 0.0:
        raise DomainError("the Green function is singular at x = y")
    what = w / r
    ang = angular_table(V, a)
    rtab = radial_table(a)

    def q(t: float, u: float) -> float:
        if t <= 0.0:
            return 0.0
        v, _ = _backend.density_points(np.array([[u * what[0], u * what[1]]]), a, ang, rtab,
                                       _t_coef(t, a), 1)
        return float(v[0])

    short, e1 = integrate.quad(lambda s: q(s, 1.0), 0.0, 1.0, epsabs=0.0, epsrel=tol, limit=200)
    long_, e2 = integrate.quad(lambda u: q(1.0, u), 0.0, 1.0, weight="alg", wvar=(1.0 - a, 0.0),
                               epsabs=0.0, epsrel=tol, limit=200)
    scale = r ** (a - 2.0)
    return DensityValue(scale * (short + a * long_), scale * (e1 + a * e2))



def _outside_nodes(edges, per_interval: int, n_gl: int, split: bool):
    xg, wg = np.polynomial.legendre.leggauss(n_gl)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if split:
            # cluster panels towards both ends, where the cone edges sit
            u = 0.5 - 0.5 * np.cos(np.linspace(0.0, math.pi, per_interval + 1))
            cuts = lo + (hi - lo) * u
        else:
            cuts = np.linspace(lo, hi, per_interval + 1)
        a, b = cuts[:-1, None], cuts[1:, None]
        nodes.append((0.5 * (b - a) * xg + 0.5 * (a + b)).ravel())
        weights.append((0.5 * (b - a) * wg).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def mass_outside_box(t, half_width: float, V: ConeUnion, alpha: float,
                     threads: int = 1, refine: int = 1) -> DensityValue:
    """``int q(t, x) dx`` over the complement of the square ``[-L, L]^2``.

    Along each direction ``u`` the radial integral runs in ``log rho`` from
    the box edge ``P(u)`` (scaled to ``t = 1``) out to ``1e4 P``; beyond
    that ``q`` is replaced by its power tail ``rho^{-2-alpha}``, which can only
    overestimate the (faster decaying) off-cone directions.  Directions cover
    a half turn since ``q`` is even, with breaks at the box corners and the
    cone edges.  The error estimate compares against a rule with half the
    panels in each variable.
    """
    from .levy import cone_arcs

    _require_2d(V)
    t = _check_t(t)
    a = _check_alpha(alpha)
    L = float(half_width)
    if not L > 0.0:
        raise DomainError("half_width must be positive")
    ang = angular_table(V, a)
    rtab = radial_table(a)
    coef = _t_coef(1.0, a)
    P0 = L * t ** (-1.0 / a)
    breaks = {0.25 * math.pi, 0.75 * math.pi}
    for lo, hi in cone_arcs(V):
        for b in (lo, hi):
            breaks.add(float(b) % math.pi)
    edges = sorted({0.0, math.pi} | {b for b in breaks if 0.0 < b < math.pi})
    vmax = math.log(1e4)

    def rule(k: int) -> float:
        beta, wb = _outside_nodes(edges, 4 * k, 16, True)
        v, wv = _outside_nodes([0.0, vmax], 3 * k, 16, False)
        c, s = np.cos(beta), np.sin(beta)
        P = P0 / np.maximum(np.abs(c), np.abs(s))
        rho = P[:, None] * np.exp(v)[None, :]
        X = np.column_stack([(rho * c[:, None]).ravel(), (rho * s[:, None]).ravel()])
        q, _ = _backend_points(X, a, ang, rtab, coef, threads)
        q = np.maximum(q, 0.0).reshape(rho.shape)
        radial = (q * rho * rho) @ wv
        radial += q[:, -1] * rho[:, -1] ** 2 / a
        return 2.0 * float(radial @ wb)

    hi = rule(2 * refine)
    lo = rule(refine)
    return DensityValue(hi, abs(hi - lo))


def _backend_points(X, alpha, ang, rtab, coef, threads):
    from . import _backend

    return _backend.density_points(X, alpha, ang, rtab, coef, threads)
