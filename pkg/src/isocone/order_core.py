"""Vectors, norms, cones and the partial order a cone induces.

Two cone families are supported:

* :class:`CircularCone` -- ``{0} u {x : <x, n> >= cos(alpha) ||x||_2}`` (an
  "ice-cream" cone around a unit axis ``n``);
* :class:`OrthantCone` -- the nonnegative orthant of ``R^d`` carrying either an
  ``l_p`` norm (``1 <= p < inf``) or the sup norm.

Every cone induces the order ``x <= y  iff  y - x in K``.  All functions are pure
and accept either :class:`RealVector` instances or plain array-likes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

SUP = math.inf
"""Norm exponent used for the sup (max) norm."""

BOUNDARY_TOL = 1e-12
"""Slack absorbed by membership tests of closed cones."""


class DimensionMismatch(ValueError):
    """Operands live in spaces of different dimension."""


class UnsupportedOrder(ValueError):
    """Requested a lattice operation for a cone whose order is not a lattice."""


def check_norm_kind(p: float) -> float:
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"norm exponent must satisfy p >= 1, got {p}")
    return p


@dataclass(frozen=True, eq=False)
class RealVector:
    """Immutable finite real vector tagged with the norm of its ambient space.

    ``norm_kind`` is the exponent ``p`` of an ``l_p`` norm, or :data:`SUP`.
    """

    entries: np.ndarray
    norm_kind: float = 2.0

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float).reshape(-1)
        if arr.size == 0:
            raise ValueError("vectors must have dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "norm_kind", check_norm_kind(self.norm_kind))

    @property
    def dim(self) -> int:
        return self.entries.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        if not isinstance(other, RealVector):
            return NotImplemented
        return self.norm_kind == other.norm_kind and np.array_equal(
            self.entries, other.entries
        )

    def __hash__(self):
        return hash((self.norm_kind, self.entries.tobytes()))

    def __repr__(self):
        return f"RealVector({self.entries.tolist()}, norm_kind={self.norm_kind})"

    def with_entries(self, entries) -> "RealVector":
        return RealVector(entries, self.norm_kind)

    def to_json(self) -> dict:
        return {"entries": self.entries.tolist(), "norm": norm_to_json(self.norm_kind)}

    @classmethod
    def from_json(cls, obj: Any) -> "RealVector":
        if isinstance(obj, list):
            return cls(obj)
        return cls(obj["entries"], norm_from_json(obj.get("norm", {"p": 2.0})))


VectorLike = Union[RealVector, np.ndarray, list, tuple]


def as_array(x: VectorLike) -> np.ndarray:
    """Return the entries of ``x`` as a 1-d float array (no copy for RealVector)."""
    if isinstance(x, RealVector):
        return x.entries
    return np.asarray(x, dtype=float).reshape(-1)


def norm_to_json(p: float):
    return "sup" if math.isinf(p) else {"p": float(p)}


def norm_from_json(obj) -> float:
    if obj == "sup" or obj == "inf":
        return SUP
    if isinstance(obj, dict) and "p" in obj:
        return check_norm_kind(obj["p"])
    if isinstance(obj, (int, float)):
        return check_norm_kind(obj)
    raise ValueError(f"unrecognised norm specification: {obj!r}")


def norm(x: VectorLike, p: float | None = None) -> float:
    """The ``l_p`` norm of ``x``, or the sup norm when ``p`` is infinite.

    If ``p`` is omitted it is taken from ``x.norm_kind`` (2 for plain arrays).
    """
    if p is None:
        p = x.norm_kind if isinstance(x, RealVector) else 2.0
    a = np.abs(as_array(x))
    if math.isinf(p):
        return float(a.max())
    if p == 2.0:
        # hypot rescales internally, so tiny or huge entries neither under- nor overflow
        return math.hypot(*a)
    if p == 1.0:
        return float(a.sum())
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # rescale to avoid overflow of |x_i|^p
    return float(scale * np.sum((a / scale) ** p) ** (1.0 / p))


@dataclass(frozen=True, eq=False)
class CircularCone:
    """Circular cone of half-angle ``half_angle`` around the unit vector ``axis``."""

    axis: np.ndarray
    half_angle: float = math.pi / 4

    def __post_init__(self):
        n = np.array(self.axis, dtype=float).reshape(-1)
        if n.size < 2:
            raise ValueError("circular cones need dimension >= 2")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("cone axis must be a unit vector")
        if not (0.0 < self.half_angle < math.pi / 2):
            raise ValueError("half angle must lie in (0, pi/2)")
        n.flags.writeable = False
        object.__setattr__(self, "axis", n)
        object.__setattr__(self, "half_angle", float(self.half_angle))

    @classmethod
    def standard(cls, dim: int = 3, half_angle: float = math.pi / 4) -> "CircularCone":
        """Cone around the first coordinate axis ``e_1``."""
        n = np.zeros(dim)
        n[0] = 1.0
        return cls(n, half_angle)

    @property
    def dim(self) -> int:
        return self.axis.size

    @property
    def norm_kind(self) -> float:
        return 2.0

    def __eq__(self, other):
        if not isinstance(other, CircularCone):
            return NotImplemented
        return self.half_angle == other.half_angle and np.array_equal(self.axis, other.axis)

    def __hash__(self):
        return hash((self.half_angle, self.axis.tobytes()))

    def __repr__(self):
        return f"CircularCone(axis={self.axis.tolist()}, half_angle={self.half_angle!r})"

    def to_json(self) -> dict:
        return {"type": "circular", "axis": self.axis.tolist(), "half_angle": self.half_angle}


@dataclass(frozen=True)
class OrthantCone:
    """Nonnegative orthant of ``R^dim`` with the given norm exponent."""

    dim: int
    norm_kind: float = 2.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("orthant dimension must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "norm_kind", check_norm_kind(self.norm_kind))

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.norm_kind)

    def to_json(self) -> dict:
        return {"type": "orthant", "dim": self.dim, "norm": norm_to_json(self.norm_kind)}


Cone = Union[CircularCone, OrthantCone]


def cone_from_json(obj: dict) -> Cone:
    kind = obj.get("type")
    if kind == "circular":
        return CircularCone(obj["axis"], obj.get("half_angle", math.pi / 4))
    if kind == "orthant":
        return OrthantCone(obj["dim"], norm_from_json(obj.get("norm", {"p": 2.0})))
    raise ValueError(f"unknown cone type: {kind!r}")


def _check_dim(cone: Cone, *xs: np.ndarray) -> None:
    for x in xs:
        if x.size != cone.dim:
            raise DimensionMismatch(f"expected dimension {cone.dim}, got {x.size}")


def cone_contains(cone: Cone, x: VectorLike, tol: float = BOUNDARY_TOL) -> bool:
    """Membership of ``x`` in the closed cone, up to ``tol`` of boundary slack.

    The origin always belongs to the cone; it is never routed through the angle
    test, whose ratio is undefined at zero.
    """
    a = as_array(x)
    _check_dim(cone, a)
    if isinstance(cone, OrthantCone):
        return bool(np.all(a >= -tol))
    if not np.any(a):
        return True
    r = float(np.sqrt(np.dot(a, a)))
    return float(np.dot(a, cone.axis)) >= math.cos(cone.half_angle) * r - tol


def leq(cone: Cone, x: VectorLike, y: VectorLike, tol: float = BOUNDARY_TOL) -> bool:
    """``x <= y`` in the order induced by ``cone``, i.e. ``y - x in cone``."""
    a, b = as_array(x), as_array(y)
    if a.size != b.size:
        raise DimensionMismatch(f"cannot compare dimensions {a.size} and {b.size}")
    return cone_contains(cone, b - a, tol)


def lattice_join(cone: Cone, x: VectorLike, y: VectorLike) -> np.ndarray:
    """Least upper bound of ``x`` and ``y``; only the orthant order is a lattice."""
    if not isinstance(cone, OrthantCone):
        raise UnsupportedOrder("the circular-cone order is not a lattice order")
    a, b = as_array(x), as_array(y)
    _check_dim(cone, a, b)
    return np.maximum(a, b)


def lattice_meet(cone: Cone, x: VectorLike, y: VectorLike) -> np.ndarray:
    if not isinstance(cone, OrthantCone):
        raise UnsupportedOrder("the circular-cone order is not a lattice order")
    a, b = as_array(x), as_array(y)
    _check_dim(cone, a, b)
    return np.minimum(a, b)


def plus_part(x: VectorLike) -> np.ndarray:
    """Lattice positive part ``max(x, 0)``, taken componentwise."""
    return np.maximum(as_array(x), 0.0)
