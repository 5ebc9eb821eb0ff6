"""Projection onto the nonnegative orthant of ``l_p`` and the duality mapping.

For ``1 <= p < inf`` the nearest nonnegative vector to ``x`` is the positive
part ``x+`` and it is unique, so the projection is single valued and
order-preserving.  For ``1 < p < inf`` the duality mapping

    J(x)_i = ||x||_p^(2 - p) |x_i|^(p - 1) sign(x_i)

is single valued; it satisfies ``<x, J x> = ||x||_p^2 = ||J x||_q^2`` with
``q = p / (p - 1)``.  The orthant is *orthogonal* (disjointly supported
``x, y`` give ``<J x, y> = 0``) and *subdual* (``J`` maps the orthant into
itself).  Together these give the variational certificate for ``x+``:
``<z - x+, J(x+ - x)> >= 0`` for every ``z >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .order_core import VectorLike, as_array, norm, plus_part

INVARIANT_RTOL = 1e-10


def project_lp(x: VectorLike) -> np.ndarray:
    return plus_part(x)


def negative_part(x: VectorLike) -> np.ndarray:
    """``x- = x+ - x``, so that ``x = x+ - x-``."""
    a = as_array(x)
    return plus_part(a) - a


def distance_lp(x: VectorLike, p: float) -> float:
    """``l_p`` distance from ``x`` to the orthant, ``||x-||_p``."""
    return norm(negative_part(x), p)


def conjugate_exponent(p: float) -> float:
    return p / (p - 1.0)


def _check_smooth(p: float) -> float:
    p = float(p)
    if not (1.0 < p < math.inf):
        raise ValueError(f"the duality map is single valued only for 1 < p < inf, got p={p}")
    return p


@dataclass(frozen=True)
class DualityVector:
    source: np.ndarray
    p: float
    image: np.ndarray

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)


class DualityInvariantError(ArithmeticError):
    pass


def duality_map(x: VectorLike, p: float) -> DualityVector:
    p = _check_smooth(p)
    a = np.array(as_array(x))
    scale = float(np.abs(a).max())
    if scale == 0.0:
        return DualityVector(a, p, np.zeros_like(a))
    # J is positively homogeneous, so work with u = x / ||x||: |u_i|^(p-1) stays
    # in [0, 1] and the invariants <u, J u> = ||J u||_q = 1 are scale free.
    # Dividing by the largest entry first keeps subnormal inputs accurate.
    w = a / scale
    nw = norm(w, p)
    u = w / nw
    ju = np.sign(u) * np.abs(u) ** (p - 1.0)
    pairing = float(np.dot(u, ju))
    nj = norm(ju, conjugate_exponent(p))
    if abs(pairing - 1.0) > INVARIANT_RTOL or abs(nj - 1.0) > INVARIANT_RTOL:
        raise DualityInvariantError(
            f"duality invariants violated: <u,Ju>={pairing}, ||Ju||_q={nj} (both should be 1)"
        )
    image = (scale * nw) * ju
    return DualityVector(a, p, image)


@dataclass(frozen=True)
class OrthogonalityReport:
    p: float
    samples: int
    seed: int
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


@dataclass(frozen=True)
class SubdualReport:
    p: float
    samples: int
    seed: int
    min_inner: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.min_inner >= -self.tol


def disjoint_pair(rng: np.random.Generator, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonnegative ``x, y`` with disjoint supports, hence ``x ^ y = 0``."""
    owner = rng.integers(0, 2, dim)
    x = rng.uniform(0.0, 5.0, dim) * (owner == 0)
    y = rng.uniform(0.0, 5.0, dim) * (owner == 1)
    return x, y


def check_orthogonal(
    p: float, sample_count: int = 10_000, seed: int = 0, max_dim: int = 6, tol: float = 1e-12
) -> OrthogonalityReport:
    """Sampled check that ``x ^ y = 0`` forces ``<J x, y> = 0``."""
    p = _check_smooth(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(sample_count):
        x, y = disjoint_pair(rng, int(rng.integers(2, max_dim + 1)))
        assert not np.any(np.minimum(x, y))
        worst = max(worst, abs(float(np.dot(duality_map(x, p).image, y))))
    return OrthogonalityReport(p, sample_count, seed, worst, tol)


def check_subdual(
    p: float, sample_count: int = 10_000, seed: int = 0, max_dim: int = 6, tol: float = 1e-12
) -> SubdualReport:
    """Sampled check that ``<J x, z> >= 0`` for ``x, z`` in the orthant.

    The quantifier ranges over cone elements ``x``: for arbitrary ``x`` the
    inequality already fails in ``l_2`` with ``z = -x``.
    """
    p = _check_smooth(p)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(sample_count):
        dim = int(rng.integers(1, max_dim + 1))
        x, z = rng.uniform(0.0, 5.0, (2, dim))
        worst = min(worst, float(np.dot(duality_map(x, p).image, z)))
    return SubdualReport(p, sample_count, seed, worst, tol)


@dataclass(frozen=True)
class Lemma71Report:
    x: np.ndarray
    p: float
    samples: int
    seed: int
    support_residual: float
    min_inner: float
    distance: float
    min_sampled_distance: float

    @property
    def optimality_gap(self) -> float:
        """``min_z ||x - z|| - ||x - x+||`` over the samples; never below zero
        for a true projection."""
        return self.min_sampled_distance - self.distance

    def passed(self, support_tol=1e-10, inner_tol=1e-12, dist_tol=1e-9) -> bool:
        return (
            self.support_residual <= support_tol
            and self.min_inner >= -inner_tol
            and self.optimality_gap >= -dist_tol
        )

    def to_json(self) -> dict:
        return {
            "x": self.x.tolist(),
            "p": self.p,
            "samples": self.samples,
            "seed": self.seed,
            "support_residual": self.support_residual,
            "min_inner": self.min_inner,
            "distance": self.distance,
            "min_sampled_distance": self.min_sampled_distance,
            "optimality_gap": self.optimality_gap,
            "passed": self.passed(),
        }


def sample_orthant(rng: np.random.Generator, dim: int, count: int, scale: float = 5.0) -> np.ndarray:
    return rng.uniform(0.0, scale, (count, dim))


def verify_lemma_7_1(x: VectorLike, p: float, sample_count: int = 10_000, seed: int = 0) -> Lemma71Report:
    """Check that ``x+`` is a nearest orthant point via the duality certificate.

    With ``x- = x+ - x`` and ``j = J(x-)``: the supports of ``x+`` and ``x-``
    are disjoint so ``<x+, j> = 0``, and ``<z, j> >= 0`` for cone points ``z``.
    Sampled distances ``||x - z||_p`` confirm optimality directly.
    """
    p = _check_smooth(p)
    a = np.array(as_array(x))
    xp, xm = plus_part(a), negative_part(a)
    j = duality_map(xm, p).image
    rng = np.random.default_rng(seed)
    eye = np.eye(a.size)
    zs = np.vstack([np.zeros(a.size), xp, xp + eye, eye, sample_orthant(rng, a.size, sample_count)])
    inner = zs @ j
    diffs = np.abs(a - zs)
    scale = diffs.max(axis=1, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    dists = (safe * np.sum((diffs / safe) ** p, axis=1, keepdims=True) ** (1.0 / p)).ravel()
    dists[scale.ravel() == 0] = 0.0
    return Lemma71Report(
        x=a,
        p=p,
        samples=len(zs),
        seed=seed,
        support_residual=abs(float(np.dot(xp, j))),
        min_inner=float(inner.min()),
        distance=norm(xm, p),
        min_sampled_distance=float(dists.min()),
    )


def coordinate_descent_projection(
    x: VectorLike, p: float, sweeps: int = 50, iters: int = 200, tol: float = 1e-15
) -> np.ndarray:
    """Nearest orthant point by projected coordinate descent (test oracle).

    Each coordinate update minimises ``||x - z||_p^p`` over ``z_i >= 0`` by
    golden-section search on ``[0, max|x| + 1]`` with the other coordinates
    held fixed.  Makes no use of the positive-part formula.
    """
    a = as_array(x)
    z = np.zeros_like(a)
    hi = float(np.abs(a).max()) + 1.0
    inv = (math.sqrt(5.0) - 1.0) / 2.0

    for _ in range(sweeps):
        moved = 0.0
        for i in range(a.size):
            # restricted to coordinate i the objective is |x_i - t|^p + const;
            # dropping the constant keeps the flat minimum resolvable
            def g(t):
                return abs(a[i] - t) ** p

            lo, up = 0.0, hi
            c, d = up - inv * (up - lo), lo + inv * (up - lo)
            gc, gd = g(c), g(d)
            for _ in range(iters):
                if up - lo <= 1e-16:
                    break
                if gc < gd:
                    up, d, gd = d, c, gc
                    c = up - inv * (up - lo)
                    gc = g(c)
                else:
                    lo, c, gc = c, d, gd
                    d = lo + inv * (up - lo)
                    gd = g(d)
            t = 0.5 * (lo + up)
            if g(0.0) <= g(t):
                t = 0.0
            moved = max(moved, abs(t - z[i]))
            z[i] = t
        if moved <= tol:
            break
    return z
