"""Closed-form heat-kernel and Green-function envelopes (constant set to 1)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    ConeUnion,
    SymmetricCone,
    dist_to_union,
    dist_to_union_many,
    meeting_legs,
)


@dataclass(frozen=True)
class ModelParams:
    """Stability index, dimension and comparability constant of the kernel."""

    alpha: float
    dimension: int = 2
    kappa: float = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a < 2.0):
            raise DomainError(f"alpha must lie in (0, 2), got {a!r}")
        if int(self.dimension) < 2:
            raise DomainError("dimension must be >= 2")
        if not float(self.kappa) >= 1.0:
            raise DomainError(f"kappa must be >= 1, got {self.kappa!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "kappa", float(self.kappa))


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t!r}")
    return t


def _cap(t: float, r: float, alpha: float) -> float:
    # 1 ^ t / r^alpha, with r = 0 giving 1
    if r <= 0.0:
        return 1.0
    return min(1.0, t / r ** alpha)


def hk_envelope(t, x, y, V: ConeUnion, params: ModelParams) -> float:
    """Two-sided heat-kernel envelope for a general cone union.

    ``t^{-d/a} (1 ^ t/|x-y|^a)^{1+d/a} (1 ^ t/dist(y-x, V)^a)``
    """
    t = _check_t(t)
    a, d = params.alpha, params.dimension
    w = np.asarray(y, float) - np.asarray(x, float)
    r = float(np.linalg.norm(w))
    base = t ** (-d / a)
    if r == 0.0:
        return base
    return base * _cap(t, r, a) ** (1 + d / a) * _cap(t, dist_to_union(V, w), a)


def hk_envelope_many(t, x, Y, V: ConeUnion, params: ModelParams) -> np.ndarray:
    """Vectorised :func:`hk_envelope` over rows of ``Y`` with a common ``x``."""
    t = _check_t(t)
    a, d = params.alpha, params.dimension
    W = np.atleast_2d(np.asarray(Y, float)) - np.asarray(x, float)[None, :]
    r = np.linalg.norm(W, axis=1)
    dist = dist_to_union_many(V, W)
    with np.errstate(divide="ignore"):
        f1 = np.where(r > 0, np.minimum(1.0, t / np.where(r > 0, r, 1.0) ** a), 1.0)
        f2 = np.where(dist > 0, np.minimum(1.0, t / np.where(dist > 0, dist, 1.0) ** a), 1.0)
    return t ** (-d / a) * f1 ** (1 + d / a) * f2


def hk_envelope_product(t, x, y, cone: SymmetricCone, params: ModelParams) -> float:
    """Single-cone envelope written through the meeting points ``S(Gamma, x, y)``."""
    t = _check_t(t)
    a, d = params.alpha, params.dimension
    base = t ** (-d / a)
    if np.array_equal(np.asarray(x, float), np.asarray(y, float)):
        return base
    big, small = meeting_legs(cone, x, y)
    return base * _cap(t, big, a) ** (1 + d / a) * _cap(t, small, a)


def green_envelope(x, y, params: ModelParams) -> float:
    """``|x - y|^{alpha - d}``."""
    r = float(np.linalg.norm(np.asarray(y, float) - np.asarray(x, float)))
    if r == 0.0:
        raise DomainError("the Green function is singular at x = y")
    return r ** (params.alpha - params.dimension)


def isotropic_envelope(t, r, params: ModelParams) -> float:
    t = _check_t(t)
    a, d = params.alpha, params.dimension
    return t ** (-d / a) * _cap(t, float(r), a) ** (1 + d / a)


__all__ = [
    "ModelParams",
    "hk_envelope",
    "hk_envelope_many",
    "hk_envelope_product",
    "green_envelope",
    "isotropic_envelope",
]
