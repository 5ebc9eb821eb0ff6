"""Metric projections onto convex cones, isotonicity audits and monotone
best-approximation solvers."""

from .order_core import (
    SUP,
    CircularCone,
    DimensionMismatch,
    OrthantCone,
    RealVector,
    UnsupportedOrder,
    cone_contains,
    cone_from_json,
    lattice_join,
    lattice_meet,
    leq,
    norm,
    plus_part,
)
from .projections import distance_to_cone, in_projection, project

__version__ = "0.1.0"

__all__ = [
    "SUP",
    "CircularCone",
    "DimensionMismatch",
    "OrthantCone",
    "RealVector",
    "UnsupportedOrder",
    "cone_contains",
    "cone_from_json",
    "distance_to_cone",
    "in_projection",
    "lattice_join",
    "lattice_meet",
    "leq",
    "norm",
    "plus_part",
    "project",
    "__version__",
]
