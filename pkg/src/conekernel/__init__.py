"""Anisotropic stable-like jump processes supported on cone unions.

Geometry of symmetric cones, closed-form heat-kernel envelopes, Lévy-measure
analytics with a Fourier density oracle in two dimensions, and a Monte Carlo
path simulator with density, exit-time and Lévy-system estimators.
"""
from .errors import (
    ConfigError,
    ContractViolation,
    DomainError,
    HorizonTooShortError,
    QuadratureError,
    UnsupportedDimensionError,
)
from .geometry import (
    ConeUnion,
    MeetingSet,
    SymmetricCone,
    cone_contains,
    dist_to_cone,
    dist_to_union,
    meeting_points,
    union_contains,
)
from .envelope import ModelParams, green_envelope, hk_envelope, hk_envelope_product

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractViolation",
    "DomainError",
    "HorizonTooShortError",
    "QuadratureError",
    "UnsupportedDimensionError",
    "ConeUnion",
    "MeetingSet",
    "SymmetricCone",
    "cone_contains",
    "dist_to_cone",
    "dist_to_union",
    "meeting_points",
    "union_contains",
    "ModelParams",
    "green_envelope",
    "hk_envelope",
    "hk_envelope_product",
]
