"""Best-approximation points of monotone maps and VI certificates.

Given an order-increasing ``f: K -> X`` on an orthant ``K``, a point ``x* in K``
is a best approximation point when ``||f(x*) - x*|| = dist(f(x*), K)``, i.e.
``x*`` is a nearest cone point to its own image.  Such points are the fixed
points of ``x -> P_K(f(x))``; the solvers find them by monotone iteration:

* downward -- from ``y*`` with ``f(y*) <= y*``, iterating the least member of
  ``P_K(f(x))`` (``f(x)+`` for ``l_p`` norms), which gives a decreasing chain
  bounded below by 0;
* upward -- from ``0``, iterating ``f(x)+`` (single-valued ``l_p`` projections
  only), which gives an increasing chain bounded above by ``y*``.

A fixed point is also a solution of the variational inequality
``<z - x*, J(x* - f(x*))> >= 0`` for all ``z in K``; :func:`verify_vi` checks
this by sampling and, for ``l_2``, through the equivalent complementarity form
``min(x*, x* - f(x*)) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .circular_cone import sample_cone
from .lp_cone import duality_map, sample_orthant
from .order_core import (
    CircularCone,
    Cone,
    DimensionMismatch,
    OrthantCone,
    VectorLike,
    as_array,
    cone_contains,
    leq,
    norm,
    plus_part,
)
from .order_fixpoint import IterationTrace, iterate_downward, iterate_upward
from .projections import distance_to_cone, smallest_member


class NotMonotoneError(ValueError):
    """A map spec that is not order-increasing for the orthant order."""


class PreconditionError(ValueError):
    """Solver called with a starting bound that violates its hypothesis."""


class AffineMap:
    """``f(x) = A x + b`` with ``A`` entrywise nonnegative (hence increasing)."""

    def __init__(self, A, b):
        A = np.array(A, dtype=float)
        b = np.array(b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.size:
            raise DimensionMismatch(f"A must be {b.size}x{b.size}, got {A.shape}")
        if np.any(A < 0):
            raise NotMonotoneError("affine maps must have an entrywise nonnegative matrix")
        A.flags.writeable = False
        b.flags.writeable = False
        self.A, self.b = A, b

    @property
    def dim(self) -> int:
        return self.b.size

    def __call__(self, x: VectorLike) -> np.ndarray:
        return self.A @ as_array(x) + self.b

    def to_json(self) -> dict:
        return {"affine": {"A": self.A.tolist(), "b": self.b.tolist()}}


class ComponentwiseMap:
    """``f(x)_i = g_i(x_i)`` with each ``g_i`` piecewise linear and nondecreasing.

    ``tables[i]`` lists breakpoints ``(x, y)``; outside the table range the
    end segments are extended with their own slopes (a single-point table is
    constant).
    """

    def __init__(self, tables):
        parsed = []
        for i, tab in enumerate(tables):
            t = np.array(tab, dtype=float).reshape(-1, 2)
            if len(t) == 0:
                raise ValueError(f"table {i} is empty")
            if np.any(np.diff(t[:, 0]) <= 0):
                raise ValueError(f"table {i}: breakpoints must be strictly increasing")
            if np.any(np.diff(t[:, 1]) < 0):
                raise NotMonotoneError(f"table {i} is not nondecreasing")
            parsed.append(t)
        self.tables = parsed

    @property
    def dim(self) -> int:
        return len(self.tables)

    def _eval(self, t: np.ndarray, v: float) -> float:
        xs, ys = t[:, 0], t[:, 1]
        if len(t) == 1:
            return float(ys[0])
        if v <= xs[0]:
            return float(ys[0] + (v - xs[0]) * (ys[1] - ys[0]) / (xs[1] - xs[0]))
        if v >= xs[-1]:
            return float(ys[-1] + (v - xs[-1]) * (ys[-1] - ys[-2]) / (xs[-1] - xs[-2]))
        return float(np.interp(v, xs, ys))

    def __call__(self, x: VectorLike) -> np.ndarray:
        a = as_array(x)
        if a.size != self.dim:
            raise DimensionMismatch(f"expected dimension {self.dim}, got {a.size}")
        return np.array([self._eval(t, v) for t, v in zip(self.tables, a)])

    def to_json(self) -> dict:
        return {"componentwise": {"tables": [t.tolist() for t in self.tables]}}


MonotoneMap = Any  # AffineMap | ComponentwiseMap | any increasing callable


def map_from_json(obj: Mapping, check_pairs: int = 200, seed: int = 0):
    """Load a map spec and spot-check monotonicity on random ordered pairs."""
    if "affine" in obj:
        f = AffineMap(obj["affine"]["A"], obj["affine"]["b"])
    elif "componentwise" in obj:
        f = ComponentwiseMap(obj["componentwise"]["tables"])
    else:
        raise ValueError("map spec needs an 'affine' or 'componentwise' entry")
    if not spot_check_increasing(f, f.dim, check_pairs, seed):
        raise NotMonotoneError("map failed the random monotonicity check")
    return f


def spot_check_increasing(f, dim: int, pairs: int = 200, seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(pairs):
        x = rng.uniform(-5.0, 5.0, dim)
        y = x + rng.uniform(0.0, 5.0, dim)
        if np.any(f(x) > f(y)):
            return False
    return True


def random_affine_instance(
    rng: np.random.Generator, dim: int, radius: float = 0.8
) -> tuple[AffineMap, np.ndarray]:
    """Random ``A >= 0`` with spectral radius ``radius`` and ``b``, plus a valid ``y*``.

    ``y* = (I - A)^{-1} (|b| + 1)`` gives ``y* - f(y*) = |b| - b + 1 >= 1``,
    so ``f(y*) <= y*`` with unit margin; ``(I - A)^{-1} >= 0`` makes ``y* >= 0``.
    """
    A = rng.uniform(0.0, 1.0, (dim, dim)) * (rng.random((dim, dim)) < 0.7)
    rho = max(abs(np.linalg.eigvals(A)))
    if rho > 0:
        A *= radius / rho
    b = rng.uniform(-3.0, 3.0, dim)
    y_star = np.linalg.solve(np.eye(dim) - A, np.abs(b) + 1.0)
    return AffineMap(A, b), np.maximum(y_star, 0.0)


@dataclass
class BestApproxResult:
    x_star: np.ndarray
    f_at_x_star: np.ndarray
    achieved_distance: float
    cone_distance: float
    fixed_point_residual: float
    vi_min_inner: float | None
    complementarity_residual: float | None
    trace: IterationTrace
    tol: float

    @property
    def converged(self) -> bool:
        return self.trace.converged

    @property
    def certificate_gap(self) -> float:
        return abs(self.achieved_distance - self.cone_distance)

    @property
    def certified(self) -> bool:
        return self.converged and self.certificate_gap <= self.tol

    def to_json(self) -> dict:
        out = {
            "converged": self.converged,
            "trace": self.trace.summary(),
        }
        if not self.converged:
            # no partial certificates for runs that did not settle
            out["last_iterate"] = self.trace.final.tolist()
            return out
        out.update(
            x_star=self.x_star.tolist(),
            f_at_x_star=self.f_at_x_star.tolist(),
            achieved_distance=self.achieved_distance,
            cone_distance=self.cone_distance,
            certificate_gap=self.certificate_gap,
            fixed_point_residual=self.fixed_point_residual,
            vi_min_inner=self.vi_min_inner,
            complementarity_residual=self.complementarity_residual,
            certified=self.certified,
        )
        return out


def _selection(cone: OrthantCone, f, how: str):
    if how == "plus":
        return lambda x: plus_part(f(x))
    if how == "smallest":
        return lambda x: smallest_member(cone, f(x))
    raise ValueError(f"unknown selection {how!r}")


def _finish(cone: OrthantCone, f, trace: IterationTrace, tol: float, vi_samples: int, seed: int):
    x = trace.final
    fx = np.asarray(f(x), dtype=float)
    p = cone.norm_kind
    achieved = norm(fx - x, p)
    dist = distance_to_cone(cone, fx)
    fp = norm(smallest_member(cone, fx) - x, p)
    vi_min = comp = None
    if not cone.is_sup:
        vi = verify_vi(cone, x, fx, vi_samples, seed)
        vi_min, comp = vi.vi_min_inner, vi.complementarity_residual
    return BestApproxResult(x, fx, achieved, dist, fp, vi_min, comp, trace, tol)


def solve_best_approx_down(
    cone: OrthantCone,
    f,
    y_star: VectorLike,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    selection: str = "smallest",
    vi_samples: int = 1000,
    seed: int = 0,
) -> BestApproxResult:
    """Best-approximation point below ``y*`` by downward iteration.

    The chain ``y* >= s(y*) >= ...`` settles on the greatest fixed point of the
    selection in ``[0, y*]``; for contractive maps that point is unique.

    ``selection="smallest"`` iterates the least member of ``P_K(f(x))``;
    ``"plus"`` iterates ``f(x)+``.  They coincide for ``l_p`` norms and differ
    for the sup norm, where only the least member gives the minimal point.
    """
    if not isinstance(cone, OrthantCone):
        raise TypeError("best-approximation solvers work on orthant cones")
    y = as_array(y_star)
    if y.size != cone.dim:
        raise DimensionMismatch(f"expected dimension {cone.dim}, got {y.size}")
    if not cone_contains(cone, y, 0.0):
        raise PreconditionError("y* must lie in the cone")
    if not leq(cone, f(y), y, 0.0):
        raise PreconditionError("f(y*) <= y* does not hold")
    trace = iterate_downward(_selection(cone, f, selection), cone, y, tol, max_iter, keep_iterates=False)
    return _finish(cone, f, trace, tol, vi_samples, seed)


def solve_best_approx_up(
    cone: OrthantCone,
    f,
    y_star: VectorLike,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    vi_samples: int = 1000,
    seed: int = 0,
) -> BestApproxResult:
    """Best-approximation point by increasing iteration from the origin.

    Needs a single-valued increasing projection (``l_p`` orthant) and
    ``P_K(f(y*)) <= y*``; starting at 0 is what makes the first step go up.
    """
    if not isinstance(cone, OrthantCone) or cone.is_sup:
        raise PreconditionError("upward solver needs a single-valued projection (l_p orthant)")
    y = as_array(y_star)
    if y.size != cone.dim:
        raise DimensionMismatch(f"expected dimension {cone.dim}, got {y.size}")
    if not cone_contains(cone, y, 0.0):
        raise PreconditionError("y* must lie in the cone")
    sel = _selection(cone, f, "plus")
    if not leq(cone, sel(y), y, 0.0):
        raise PreconditionError("P_K(f(y*)) <= y* does not hold")
    trace = iterate_upward(sel, cone, np.zeros(cone.dim), y, tol, max_iter, keep_iterates=False)
    return _finish(cone, f, trace, tol, vi_samples, seed)


@dataclass(frozen=True)
class VIReport:
    vi_min_inner: float
    complementarity_residual: float | None
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "vi_min_inner": self.vi_min_inner,
            "complementarity_residual": self.complementarity_residual,
            "samples": self.samples,
            "seed": self.seed,
        }


def verify_vi(
    cone: Cone, x_star: VectorLike, f_value: VectorLike, sample_count: int = 10_000, seed: int = 0
) -> VIReport:
    """Sampled check of ``<z - x*, J(x* - f(x*))> >= 0`` over cone points ``z``.

    ``J`` is the identity for Euclidean cones and the ``l_p`` duality map
    otherwise (``1 < p < inf``).  For the ``l_2`` orthant the exact
    complementarity residual ``max_i |min(x*_i, (x* - f)_i)|`` is reported too.
    """
    x, fx = as_array(x_star), as_array(f_value)
    if x.size != cone.dim or fx.size != cone.dim:
        raise DimensionMismatch("x*, f(x*) and the cone must share a dimension")
    g = x - fx
    rng = np.random.default_rng(seed)
    if isinstance(cone, CircularCone):
        j = g
        zs = sample_cone(cone, rng, sample_count)
        extra = [cone.axis]
    else:
        if cone.is_sup:
            raise ValueError("the sup-norm duality map is set valued; no VI certificate")
        j = g if cone.norm_kind == 2.0 else duality_map(g, cone.norm_kind).image
        zs = sample_orthant(rng, cone.dim, sample_count)
        extra = list(np.eye(cone.dim))
    fixed = np.vstack([np.zeros(cone.dim), x, 2.0 * x, *extra])
    zs = np.vstack([fixed, zs])
    inner = (zs - x) @ j
    comp = None
    if isinstance(cone, OrthantCone) and cone.norm_kind == 2.0:
        comp = float(np.max(np.abs(np.minimum(x, g))))
    return VIReport(float(inner.min()), comp, len(zs), seed)


@dataclass(frozen=True)
class CertificateCheck:
    fixed_point: bool
    best_approx: bool
    complementarity: bool

    @property
    def agree(self) -> bool:
        return self.fixed_point == self.best_approx == self.complementarity


def certificates(cone: OrthantCone, f, x: VectorLike, tol: float) -> CertificateCheck:
    """The three equivalent optimality tests at a candidate point ``x`` (``l_2`` orthant):
    fixed point of ``f(.)+``, equal distances, and complementarity."""
    if cone.norm_kind != 2.0:
        raise ValueError("the complementarity form is exact only for l_2")
    a = as_array(x)
    fx = f(a)
    fp = norm(plus_part(fx) - a, 2.0)
    gap = abs(norm(fx - a, 2.0) - distance_to_cone(cone, fx))
    comp = float(np.max(np.abs(np.minimum(a, a - fx))))
    return CertificateCheck(fp <= tol, gap <= tol, comp <= tol)

