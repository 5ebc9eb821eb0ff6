"""Set-valued projection onto the nonnegative orthant under the sup norm.

In ``(R^d, ||.||_inf)`` the nearest-point map onto ``K = R^d_+`` is not single
valued.  With

* ``zeta(x)``  -- indices where ``x_i <= 0``,
* ``lam(x)``   -- ``max |x_i|`` over ``zeta(x)`` (0 if ``zeta`` is empty),
* ``xi(x)``    -- indices of ``zeta(x)`` where ``|x_i| = lam(x)``,

the projection set is ``{z >= 0 : z_i = 0 on xi(x), |z_i - x_i| <= lam(x)}``
and every member is at distance exactly ``lam(x)`` from ``x``.  The set has a
componentwise least element ``max(x+ - lam, 0)`` and a greatest element
``x + lam``; both are exposed because the monotonicity audits compare them.

Grids of a function space (``C[a, b]``, ``l_inf`` truncations) are handled as
plain vectors: the formulas are identical pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .order_core import DimensionMismatch, VectorLike, as_array, plus_part

__all__ = [
    "ProjectionProfile",
    "ProjectionSet",
    "profile",
    "in_projection_set",
    "plus_part",
    "smallest_projection",
    "largest_projection",
    "distance_to_cone",
    "projection_set",
]


@dataclass(frozen=True)
class ProjectionProfile:
    zeta: tuple[int, ...]
    lam: float
    xi: tuple[int, ...]

    def to_json(self) -> dict:
        return {"zeta": list(self.zeta), "lambda": self.lam, "xi": list(self.xi)}


def profile(x: VectorLike) -> ProjectionProfile:
    a = as_array(x)
    zeta = np.flatnonzero(a <= 0.0)
    if zeta.size == 0:
        return ProjectionProfile((), 0.0, ())
    mags = np.abs(a[zeta])
    lam = float(mags.max())
    xi = zeta[mags == lam]
    return ProjectionProfile(tuple(zeta.tolist()), lam, tuple(xi.tolist()))


def distance_to_cone(x: VectorLike) -> float:
    """Sup-norm distance from ``x`` to the orthant, i.e. ``lam(x)``."""
    return profile(x).lam


def in_projection_set(x: VectorLike, z: VectorLike, tol: float = 0.0) -> bool:
    """Whether ``z`` is a nearest orthant point to ``x`` in the sup norm.

    ``tol`` loosens each inequality by an absolute amount; the default is
    exact comparison, which is what grid-valued inputs need.
    """
    a, c = as_array(x), as_array(z)
    if a.size != c.size:
        raise DimensionMismatch(f"cannot compare dimensions {a.size} and {c.size}")
    prof = profile(a)
    if np.any(c < -tol):
        return False
    if prof.xi and np.any(np.abs(c[list(prof.xi)]) > tol):
        return False
    return bool(np.all(np.abs(c - a) <= prof.lam + tol))


def smallest_projection(x: VectorLike) -> np.ndarray:
    """Componentwise least member of the projection set, ``max(x+ - lam, 0)``."""
    a = as_array(x)
    return np.maximum(plus_part(a) - profile(a).lam, 0.0)


def largest_projection(x: VectorLike) -> np.ndarray:
    """Componentwise greatest member, ``x + lam``.

    Exists only because the space is finite dimensional; the continuous-function
    analogue of this element need not be continuous.
    """
    a = as_array(x)
    return a + profile(a).lam


@dataclass(frozen=True)
class ProjectionSet:
    source: np.ndarray
    profile: ProjectionProfile
    plus_part: np.ndarray
    smallest: np.ndarray
    largest: np.ndarray

    @property
    def is_singleton(self) -> bool:
        return self.profile.lam == 0.0

    def contains(self, z: VectorLike, tol: float = 0.0) -> bool:
        return in_projection_set(self.source, z, tol)

    def to_json(self) -> dict:
        return {
            "source": self.source.tolist(),
            "profile": self.profile.to_json(),
            "plus_part": self.plus_part.tolist(),
            "smallest": self.smallest.tolist(),
            "largest": self.largest.tolist(),
            "distance": self.profile.lam,
            "singleton": self.is_singleton,
        }


def projection_set(x: VectorLike) -> ProjectionSet:
    a = np.array(as_array(x))
    a.flags.writeable = False
    return ProjectionSet(
        source=a,
        profile=profile(a),
        plus_part=plus_part(a),
        smallest=smallest_projection(a),
        largest=largest_projection(a),
    )
