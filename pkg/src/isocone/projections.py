"""Uniform access to the projection of each supported cone family."""

from __future__ import annotations

import numpy as np

from . import supnorm_cone
from .circular_cone import project_circular
from .lp_cone import distance_lp
from .order_core import CircularCone, Cone, OrthantCone, VectorLike, as_array, norm, plus_part

REPRESENTATIVES = ("plus", "smallest", "largest")


def is_single_valued(cone: Cone) -> bool:
    return not (isinstance(cone, OrthantCone) and cone.is_sup)


def project(cone: Cone, x: VectorLike, representative: str = "plus") -> np.ndarray:
    """A nearest cone point to ``x``.

    For the sup-norm orthant the projection is a set; ``representative`` picks
    its plus part, least or greatest element.  Single-valued cones ignore it.
    """
    if representative not in REPRESENTATIVES:
        raise ValueError(f"unknown representative {representative!r}")
    if isinstance(cone, CircularCone):
        return project_circular(cone, x)
    if cone.is_sup:
        if representative == "smallest":
            return supnorm_cone.smallest_projection(x)
        if representative == "largest":
            return supnorm_cone.largest_projection(x)
    return plus_part(x)


def smallest_member(cone: Cone, x: VectorLike) -> np.ndarray:
    return project(cone, x, "smallest")


def largest_member(cone: Cone, x: VectorLike) -> np.ndarray:
    return project(cone, x, "largest")


def distance_to_cone(cone: Cone, x: VectorLike) -> float:
    """Distance from ``x`` to ``cone`` in the cone's ambient norm, by closed form."""
    a = as_array(x)
    if isinstance(cone, CircularCone):
        return norm(a - project_circular(cone, a), 2.0)
    if cone.is_sup:
        return supnorm_cone.distance_to_cone(a)
    return distance_lp(a, cone.norm_kind)


def in_projection(cone: Cone, x: VectorLike, z: VectorLike, tol: float = 0.0) -> bool:
    """Membership of ``z`` in the projection set of ``x``."""
    if is_single_valued(cone):
        return bool(np.all(np.abs(as_array(z) - project(cone, x)) <= tol))
    return supnorm_cone.in_projection_set(x, z, tol)
