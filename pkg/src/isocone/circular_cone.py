"""Metric projection onto a circular (ice-cream) cone in Euclidean space.

For the right-angled cone (half-angle pi/4) the projection of a point ``u``
that lies in neither ``K`` nor ``-K`` has the closed form

    a = <u, n>,   b = u - a n,   r = ||b||,
    P_K(u) = (a + r) / 2 * (n + b / r),

which lands on the boundary ray of ``K`` in the plane spanned by ``n`` and
``b``.  A general half-angle ``alpha`` uses the same ray,
``cos(alpha) n + sin(alpha) b / r``, scaled by ``a cos(alpha) + r sin(alpha)``.

The module also reproduces the classic witness that ``P_K`` is *not* monotone
for the order induced by ``K``: ``u = (1, sqrt 2, 0)`` dominates
``v = (0, 1/sqrt 2, 1/sqrt 2)`` but ``P_K(u) - P_K(v)`` leaves the cone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .order_core import (
    CircularCone,
    DimensionMismatch,
    VectorLike,
    as_array,
    cone_contains,
    leq,
)

SQRT2 = math.sqrt(2.0)
RIGHT_ANGLE_HALF = math.pi / 4
_DEGENERATE_RADIUS = 1e-14


class Region(enum.Enum):
    INSIDE_K = "InsideK"
    INSIDE_NEG_K = "InsideNegK"
    OUTSIDE = "Outside"


def _split(cone: CircularCone, u: np.ndarray) -> tuple[float, np.ndarray, float]:
    a = float(np.dot(u, cone.axis))
    b = u - a * cone.axis
    return a, b, float(np.sqrt(np.dot(b, b)))


def _check(cone: CircularCone, u: VectorLike) -> np.ndarray:
    arr = as_array(u)
    if arr.size != cone.dim:
        raise DimensionMismatch(f"expected dimension {cone.dim}, got {arr.size}")
    return arr


def classify_region(cone: CircularCone, u: VectorLike) -> Region:
    """Which of ``K``, ``-K`` or the complement of both contains ``u``."""
    arr = _check(cone, u)
    if cone_contains(cone, arr):
        return Region.INSIDE_K
    if cone_contains(cone, -arr):
        return Region.INSIDE_NEG_K
    return Region.OUTSIDE


def _project_outside(cone: CircularCone, u: np.ndarray) -> np.ndarray:
    a, b, r = _split(cone, u)
    if cone.half_angle == RIGHT_ANGLE_HALF:
        return 0.5 * (a + r) * (cone.axis + b / r)
    # nearest boundary ray lies in the plane of n and u
    ca, sa = math.cos(cone.half_angle), math.sin(cone.half_angle)
    s = a * ca + r * sa
    return s * (ca * cone.axis + (sa / r) * b)


def project_circular(cone: CircularCone, u: VectorLike) -> np.ndarray:
    """Euclidean projection of ``u`` onto ``cone``.

    Points of ``K`` are fixed and points of the polar cone (around ``-n`` with
    half-angle ``pi/2 - alpha``) map to the origin; for ``alpha = pi/4`` the
    polar cone is ``-K``.  Everything else lands on the boundary ray in the
    plane of ``n`` and ``u``.
    """
    arr = _check(cone, u)
    if cone_contains(cone, arr):
        return arr.copy()
    a, _, r = _split(cone, arr)
    if a * math.cos(cone.half_angle) + r * math.sin(cone.half_angle) <= 0.0:
        return np.zeros_like(arr)
    if r < _DEGENERATE_RADIUS:
        # only reachable through rounding right at the axis
        return arr.copy() if a > 0 else np.zeros_like(arr)
    return _project_outside(cone, arr)


def boundary_ratio(cone: CircularCone, w: VectorLike) -> float:
    """``<w, n> / ||w||``; equals ``cos(alpha)`` on the cone boundary."""
    arr = as_array(w)
    return float(np.dot(arr, cone.axis) / np.linalg.norm(arr))


def _orthonormal_complement(n: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis of the hyperplane orthogonal to ``n``."""
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(n.size)]))
    return q[:, 1 : n.size].T


def sample_cone(
    cone: CircularCone,
    rng: np.random.Generator,
    count: int,
    boundary_fraction: float = 0.5,
) -> np.ndarray:
    """Random cone elements ``t (cos(th) n + sin(th) d)`` with ``d`` a unit
    direction orthogonal to ``n``.

    A ``boundary_fraction`` of the samples sit exactly on the boundary
    (``th = alpha``); the rest have ``th`` uniform on ``[0, alpha]``.  Radii are
    log-uniform on ``[1e-3, 1e3]``.
    """
    basis = _orthonormal_complement(cone.axis)
    g = rng.standard_normal((count, basis.shape[0]))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    d = (g / norms) @ basis
    theta = rng.uniform(0.0, cone.half_angle, count)
    on_boundary = rng.random(count) < boundary_fraction
    theta[on_boundary] = cone.half_angle
    t = 10.0 ** rng.uniform(-3.0, 3.0, count)
    dirs = np.cos(theta)[:, None] * cone.axis + np.sin(theta)[:, None] * d
    return t[:, None] * dirs


@dataclass(frozen=True)
class ProjectionCheck:
    min_inner: float
    orthogonality_residual: float
    samples: int


def verify_projection_vi(
    cone: CircularCone,
    u: VectorLike,
    w: VectorLike,
    sample_count: int = 10_000,
    seed: int = 0,
) -> ProjectionCheck:
    """Check the variational characterisation of ``w = P_K(u)``.

    Reports ``min <z - w, w - u>`` over sampled cone points ``z`` (always
    including ``0``, ``n``, ``w`` and ``2w``) together with ``|<w, w - u>|``.
    A true projection has a nonnegative minimum and zero residual.
    """
    uu, ww = _check(cone, u), _check(cone, w)
    rng = np.random.default_rng(seed)
    fixed = np.stack([np.zeros_like(ww), cone.axis, ww, 2.0 * ww])
    zs = np.vstack([fixed, sample_cone(cone, rng, sample_count)])
    g = ww - uu
    inner = (zs - ww) @ g
    return ProjectionCheck(
        min_inner=float(inner.min()),
        orthogonality_residual=abs(float(np.dot(ww, g))),
        samples=len(zs),
    )


# --- brute-force oracle ----------------------------------------------------


def brute_force_projection(
    cone: CircularCone,
    u: VectorLike,
    coarse_step: float = 0.02,
    fine_step: float = 1e-3,
    levels: int = 5,
) -> np.ndarray:
    """Nearest cone point in ``R^3`` found by searching over cone rays.

    Directions are parametrised by polar angle ``th in [0, alpha]`` and azimuth
    ``ph``; a coarse grid is followed by zoom levels whose finest grid spacing
    is at most ``fine_step`` and then shrinks tenfold per level.  Along each ray
    the best radius minimises the parabola ``t^2 - 2 t <u, d>`` over ``t >= 0``.
    The search over rays is independent of the closed form; used as a test
    oracle only.
    """
    uu = _check(cone, u)
    if cone.dim != 3:
        raise ValueError("the ray-grid oracle is implemented for R^3 only")
    e1, e2 = _orthonormal_complement(cone.axis)
    alpha = cone.half_angle

    def evaluate(th, ph):
        th, ph = np.meshgrid(th, ph, indexing="ij")
        th, ph = th.ravel(), ph.ravel()
        dirs = (
            np.cos(th)[:, None] * cone.axis
            + (np.sin(th) * np.cos(ph))[:, None] * e1
            + (np.sin(th) * np.sin(ph))[:, None] * e2
        )
        t = np.maximum(dirs @ uu, 0.0)
        pts = t[:, None] * dirs
        dist = np.linalg.norm(pts - uu, axis=1)
        k = int(np.argmin(dist))
        return th[k], ph[k], pts[k], dist[k]

    th_grid = np.linspace(0.0, alpha, int(math.ceil(alpha / coarse_step)) + 1)
    ph_grid = np.linspace(0.0, 2 * math.pi, int(math.ceil(2 * math.pi / coarse_step)), endpoint=False)
    th0, ph0, best, best_d = evaluate(th_grid, ph_grid)
    window, step = 1.5 * coarse_step, fine_step
    for _ in range(levels):
        offsets = step * np.arange(-math.ceil(window / step), math.ceil(window / step) + 1)
        # clipping puts grid points exactly on the boundary th = alpha
        th = np.unique(np.clip(th0 + offsets, 0.0, alpha))
        th0, ph0, cand, cand_d = evaluate(th, ph0 + offsets)
        if cand_d <= best_d:
            best, best_d = cand, cand_d
        window, step = 2.0 * step, step / 10.0
    return best


# --- the non-monotonicity witness -----------------------------------------


@dataclass(frozen=True)
class CounterexampleReport:
    u: np.ndarray
    v: np.ndarray
    pu: np.ndarray
    pv: np.ndarray
    diff: np.ndarray
    ratio: float
    threshold: float
    order_holds_on_inputs: bool
    order_holds_on_outputs: bool

    def to_json(self) -> dict:
        return {
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "pu": self.pu.tolist(),
            "pv": self.pv.tolist(),
            "diff": self.diff.tolist(),
            "ratio": self.ratio,
            "threshold": self.threshold,
            "order_holds_on_inputs": self.order_holds_on_inputs,
            "order_holds_on_outputs": self.order_holds_on_outputs,
        }


WITNESS_U = (1.0, SQRT2, 0.0)
WITNESS_V = (0.0, 1.0 / SQRT2, 1.0 / SQRT2)


class WitnessFailure(AssertionError):
    """The stored counterexample no longer reproduces."""


def monotonicity_witness() -> CounterexampleReport:
    """Evaluate the fixed pair ``v <= u`` whose projections are not ordered."""
    cone = CircularCone.standard(3)
    u, v = np.array(WITNESS_U), np.array(WITNESS_V)
    pu, pv = project_circular(cone, u), project_circular(cone, v)
    diff = pu - pv
    ratio = boundary_ratio(cone, diff)
    threshold = math.cos(cone.half_angle)
    report = CounterexampleReport(
        u=u,
        v=v,
        pu=pu,
        pv=pv,
        diff=diff,
        ratio=ratio,
        threshold=threshold,
        order_holds_on_inputs=leq(cone, v, u),
        order_holds_on_outputs=leq(cone, pv, pu),
    )
    if not report.order_holds_on_inputs:
        raise WitnessFailure("v <= u no longer holds for the stored witness")
    if not ratio < threshold:
        raise WitnessFailure(f"projection difference re-entered the cone (ratio {ratio})")
    return report
