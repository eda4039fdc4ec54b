"""Symmetric cones, finite unions of them, and the two-jump meeting points.

A symmetric cone ``Gamma(axis, aperture)`` is the set of nonzero ``z`` whose
angle with the line spanned by ``axis`` is strictly less than ``aperture``.
The boundary is not part of the cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError

#: Absolute tolerance for "on the boundary" decisions at unit scale.
BOUNDARY_TOL = 1e-9


def unit_vector(components: Sequence[float]) -> np.ndarray:
    """Return ``components`` scaled to unit Euclidean norm.

    Raises
    ------
    DomainError
        If fewer than two components are given or the vector is zero.
    """
    v = np.asarray(components, dtype=float).reshape(-1)
    if v.size < 2:
        raise DomainError("unit vectors need dimension d >= 2")
    n = float(np.linalg.norm(v))
    if not np.isfinite(n) or n == 0.0:
        raise DomainError("cannot normalise a zero or non-finite vector")
    return v / n


def _as_point(z, d: int | None = None) -> np.ndarray:
    p = np.asarray(z, dtype=float).reshape(-1)
    if d is not None and p.size != d:
        raise DomainError(f"expected a point in R^{d}, got {p.size} components")
    return p


@dataclass(frozen=True)
class SymmetricCone:
    """Double circular cone with apex at the origin.

    Parameters
    ----------
    axis : sequence of float
        Direction of the cone axis; normalised on construction.
    aperture : float
        Half-angle in radians, ``0 < aperture <= pi/2``.
    """

    axis: tuple[float, ...]
    aperture: float

    def __post_init__(self):
        a = unit_vector(self.axis)
        object.__setattr__(self, "axis", tuple(float(c) for c in a))
        th = float(self.aperture)
        if not (0.0 < th <= math.pi / 2):
            raise DomainError(f"aperture must lie in (0, pi/2], got {th!r}")
        object.__setattr__(self, "aperture", th)

    @property
    def dimension(self) -> int:
        return len(self.axis)

    @cached_property
    def axis_array(self) -> np.ndarray:
        a = np.array(self.axis)
        a.flags.writeable = False
        return a

    @property
    def cos_aperture(self) -> float:
        return math.cos(self.aperture)

    def contains(self, z) -> bool:
        return cone_contains(self, z)

    def to_dict(self) -> dict:
        return {"axis": list(self.axis), "aperture": self.aperture}


@dataclass(frozen=True)
class ConeUnion:
    """Finite union ``V`` of symmetric cones in ``R^d``."""

    dimension: int
    cones: tuple[SymmetricCone, ...] = field(default_factory=tuple)

    def __post_init__(self):
        d = int(self.dimension)
        if d < 2:
            raise DomainError("dimension must be >= 2")
        cones = tuple(self.cones)
        if not cones:
            raise DomainError("a cone union needs at least one cone")
        for c in cones:
            if not isinstance(c, SymmetricCone):
                raise DomainError(f"not a SymmetricCone: {c!r}")
            if c.dimension != d:
                raise DomainError(
                    f"cone axis has dimension {c.dimension}, union has {d}")
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "cones", cones)

    @classmethod
    def from_specs(cls, specs, dimension: int | None = None) -> "ConeUnion":
        """Build from ``[(axis, aperture), ...]`` or ``[{"axis":..., "aperture":...}]``."""
        cones = []
        for s in specs:
            if isinstance(s, SymmetricCone):
                cones.append(s)
            elif isinstance(s, dict):
                cones.append(SymmetricCone(tuple(s["axis"]), s["aperture"]))
            else:
                axis, ap = s
                cones.append(SymmetricCone(tuple(axis), ap))
        d = dimension if dimension is not None else cones[0].dimension
        return cls(d, tuple(cones))

    @classmethod
    def single(cls, axis, aperture) -> "ConeUnion":
        c = SymmetricCone(tuple(axis), aperture)
        return cls(c.dimension, (c,))

    def __len__(self):
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)

    @cached_property
    def axes(self) -> np.ndarray:
        """Array of shape ``(n, d)`` with the cone axes."""
        a = np.array([c.axis for c in self.cones])
        a.flags.writeable = False
        return a

    @cached_property
    def apertures(self) -> np.ndarray:
        a = np.array([c.aperture for c in self.cones])
        a.flags.writeable = False
        return a

    def contains(self, z) -> bool:
        return union_contains(self, z)

    def to_list(self) -> list[dict]:
        return [c.to_dict() for c in self.cones]


def cone_contains(cone: SymmetricCone, z) -> bool:
    """True iff ``|axis . z| > |z| cos(aperture)`` (boundary excluded)."""
    p = _as_point(z, cone.dimension)
    n = float(np.linalg.norm(p))
    if n == 0.0:
        raise DomainError("cone membership is undefined at the origin")
    return abs(float(cone.axis_array @ p)) > n * cone.cos_aperture


def union_contains(V: ConeUnion, z) -> bool:
    p = _as_point(z, V.dimension)
    if not np.any(p):
        raise DomainError("cone membership is undefined at the origin")
    return any(cone_contains(c, p) for c in V.cones)


def contains_many(V: ConeUnion, Z) -> np.ndarray:
    """Vectorised membership test for the rows of ``Z`` (zero rows -> False)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    norms = np.linalg.norm(Z, axis=1)
    proj = np.abs(Z @ V.axes.T)
    inside = proj > norms[:, None] * np.cos(V.apertures)[None, :]
    return np.any(inside, axis=1) & (norms > 0)


def dist_to_cone(cone: SymmetricCone, w) -> float:
    """Euclidean distance from ``w`` to the closure of ``cone``."""
    p = _as_point(w, cone.dimension)
    n = float(np.linalg.norm(p))
    if n == 0.0:
        return 0.0
    c = min(1.0, abs(float(cone.axis_array @ p)) / n)
    excess = math.acos(c) - cone.aperture
    return n * math.sin(excess) if excess > 0.0 else 0.0


def dist_to_union(V: ConeUnion, w) -> float:
    p = _as_point(w, V.dimension)
    return min(dist_to_cone(c, p) for c in V.cones)


def dist_to_union_many(V: ConeUnion, W) -> np.ndarray:
    """Vectorised :func:`dist_to_union` over the rows of ``W``."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n = np.linalg.norm(W, axis=1)
    safe = np.where(n > 0, n, 1.0)
    c = np.minimum(1.0, np.abs(W @ V.axes.T) / safe[:, None])
    excess = np.maximum(0.0, np.arccos(c) - V.apertures[None, :])
    return np.where(n > 0, n * np.sin(excess.min(axis=1)), 0.0)


def nearest_cone(V: ConeUnion, w) -> SymmetricCone:
    """The cone of ``V`` achieving :func:`dist_to_union` (first on ties)."""
    p = _as_point(w, V.dimension)
    return min(V.cones, key=lambda c: dist_to_cone(c, p))


@dataclass(frozen=True)
class MeetingSet:
    """The set ``S(Gamma, x, y)`` of intermediate points of a shortest two-leg path.

    ``points`` holds two points ``z, zbar`` (or ``x, y`` when ``y - x`` lies in
    the closed cone).  ``direct`` is True in the latter case.
    """

    points: tuple[np.ndarray, np.ndarray]
    min_sum: float
    direct: bool
    diagnostic: str = ""

    def legs(self, x, y, which: int = 0) -> tuple[float, float]:
        """Return ``(max leg, min leg)`` for one of the two points."""
        z = self.points[which]
        a = float(np.linalg.norm(np.asarray(x, float) - z))
        b = float(np.linalg.norm(np.asarray(y, float) - z))
        return max(a, b), min(a, b)


def _plane_basis(axis: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (axis, e) spanning the plane of ``axis`` and ``w``."""
    perp = w - (axis @ w) * axis
    n = float(np.linalg.norm(perp))
    return axis, perp / n


def meeting_points(cone: SymmetricCone, x, y) -> MeetingSet:
    """Compute ``S(Gamma, x, y)`` for a single symmetric cone.

    If ``y - x`` lies in the closed cone the set is ``{x, y}``.  Otherwise the
    problem is reduced to the plane through ``x`` spanned by the axis and
    ``y - x``: orthogonal projection onto that plane keeps cone membership and
    shortens both legs, so the minimisers live there.  In the plane each
    boundary line of ``Gamma_x`` meets the non-parallel boundary line of
    ``Gamma_y`` once, and the two intersection points are mirror images
    through the midpoint of ``x`` and ``y``.
    """
    d = cone.dimension
    xp = _as_point(x, d)
    yp = _as_point(y, d)
    w = yp - xp
    L = float(np.linalg.norm(w))
    if L == 0.0:
        raise DomainError("meeting points need x != y")
    lam = cone.axis_array
    th = cone.aperture
    cos_w = abs(float(lam @ w)) / L
    ang = math.acos(min(1.0, cos_w))
    if ang <= th + BOUNDARY_TOL:
        diag = "boundary" if ang > th - BOUNDARY_TOL else ""
        return MeetingSet((xp.copy(), yp.copy()), L, True, diag)

    # plane coordinates: p along the axis, q along the normal part of w (q > 0)
    e_p, e_q = _plane_basis(lam, w)
    wp, wq = float(e_p @ w), float(e_q @ w)
    c, s = math.cos(th), math.sin(th)
    u1 = np.array([c, s])
    u2 = np.array([c, -s])
    wv = np.array([wp, wq])
    cands = []
    for a_dir, b_dir in ((u1, u2), (u2, u1)):
        # a * a_dir - b * b_dir = w
        M = np.column_stack([a_dir, -b_dir])
        a, _ = np.linalg.solve(M, wv)
        zp = a * a_dir
        cands.append(xp + zp[0] * e_p + zp[1] * e_q)
    sums = [float(np.linalg.norm(z - xp) + np.linalg.norm(yp - z)) for z in cands]
    diag = ""
    if abs(sums[0] - sums[1]) > BOUNDARY_TOL * max(1.0, L):
        diag = f"asymmetric candidate sums {sums[0]!r} != {sums[1]!r}"
    return MeetingSet((cands[0], cands[1]), min(sums), False, diag)


def meeting_legs(cone: SymmetricCone, x, y) -> tuple[float, float]:
    """``(|x-z| v |y-z|, |x-z| ^ |y-z|)`` for ``z`` in ``S(Gamma, x, y)``.

    In the direct case the minimum leg is 0 (``z = x`` or ``z = y``).
    """
    ms = meeting_points(cone, x, y)
    if ms.direct:
        return ms.min_sum, 0.0
    return ms.legs(x, y)


def max_distance_direction(V: ConeUnion, n_grid: int = 20000) -> np.ndarray:
    """Unit direction in the plane of the first two coordinates farthest from ``V``.

    Only the ``(e1, e2)`` plane is searched; for ``d = 2`` that is the sphere.
    """
    d = V.dimension
    beta = np.linspace(0.0, math.pi, n_grid, endpoint=False)
    U = np.zeros((n_grid, d))
    U[:, 0], U[:, 1] = np.cos(beta), np.sin(beta)
    i = int(np.argmax(dist_to_union_many(V, U)))
    lo, hi = beta[i] - math.pi / n_grid, beta[i] + math.pi / n_grid
    gr = (math.sqrt(5) - 1) / 2

    def f(b):
        u = np.zeros(d)
        u[0], u[1] = math.cos(b), math.sin(b)
        return -dist_to_union(V, u)

    # golden-section refine
    a, b = lo, hi
    c1, c2 = b - gr * (b - a), a + gr * (b - a)
    for _ in range(60):
        if f(c1) < f(c2):
            b, c2 = c2, c1
            c1 = b - gr * (b - a)
        else:
            a, c1 = c1, c2
            c2 = a + gr * (b - a)
    bb = 0.5 * (a + b)
    u = np.zeros(d)
    u[0], u[1] = math.cos(bb), math.sin(bb)
    return u


def sphere_directions(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniformly random unit vectors in ``R^d``."""
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
