"""Fixed points of order-increasing-downward maps.

Two halves:

* an exhaustive oracle on finite posets -- enumerate the fixed points of a
  set-valued map ``F``, locate its minimal fixed points both directly and via
  the set ``B = {z : some v in F(z) has v <= z}`` (whose minimal elements are
  fixed points whenever ``F`` is increasing downward), and check the existence
  claims for a given start ``v* in F(y*)`` with ``v* <= y*``;
* :func:`iterate_downward`, which walks the decreasing chain
  ``y* >= s(y*) >= s(s(y*)) >= ...`` of a monotone single-valued selection on a
  cone-ordered vector space until it stalls.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .order_core import BOUNDARY_TOL, Cone, VectorLike, as_array, leq, norm


class PosetError(ValueError):
    """The relation handed to :class:`FinitePoset` is not a partial order."""


class FinitePoset:
    """A finite partially ordered set given by its ``<=`` matrix.

    ``leq_matrix[i, j]`` is true iff ``elements[i] <= elements[j]``.
    """

    def __init__(self, elements: Sequence[Hashable], leq_matrix):
        self.elements = list(elements)
        m = np.array(leq_matrix, dtype=bool)
        n = len(self.elements)
        if m.shape != (n, n):
            raise PosetError(f"order matrix must be {n}x{n}, got {m.shape}")
        if len(set(self.elements)) != n:
            raise PosetError("element labels must be distinct")
        if not m.diagonal().all():
            raise PosetError("relation is not reflexive")
        if np.any(m & m.T & ~np.eye(n, dtype=bool)):
            raise PosetError("relation is not antisymmetric")
        # (m @ m) is the two-step relation; it must be contained in m
        if np.any((m.astype(int) @ m.astype(int) > 0) & ~m):
            raise PosetError("relation is not transitive")
        m.flags.writeable = False
        self.leq_matrix = m
        self.index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"FinitePoset({self.elements!r})"

    def leq(self, a, b) -> bool:
        return bool(self.leq_matrix[self.index[a], self.index[b]])

    def minimal(self, subset: Iterable) -> set:
        """Minimal elements of ``subset`` in this order."""
        s = list(subset)
        return {a for a in s if not any(b != a and self.leq(b, a) for b in s)}

    def is_chain(self, subset: Iterable) -> bool:
        s = list(subset)
        return all(self.leq(a, b) or self.leq(b, a) for a, b in itertools.combinations(s, 2))

    def down_set(self, y) -> set:
        """The principal ideal ``(y] = {x : x <= y}``."""
        j = self.index[y]
        return {e for i, e in enumerate(self.elements) if self.leq_matrix[i, j]}

    def to_json(self) -> dict:
        return {"elements": list(self.elements), "leq": self.leq_matrix.tolist()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "FinitePoset":
        return cls(obj["elements"], obj["leq"])


class SetValuedMap:
    """Assignment of a nonempty image set to every element of a poset."""

    def __init__(self, poset: FinitePoset, images: Mapping):
        missing = set(poset.elements) - set(images)
        if missing:
            raise ValueError(f"no image given for {sorted(map(str, missing))}")
        imgs = {}
        for k, v in images.items():
            if k not in poset.index:
                raise ValueError(f"{k!r} is not an element of the poset")
            vals = frozenset(v)
            if not vals:
                raise ValueError(f"image of {k!r} is empty")
            if not vals <= set(poset.elements):
                raise ValueError(f"image of {k!r} leaves the poset")
            imgs[k] = vals
        self.poset = poset
        self.images = imgs

    def __call__(self, x) -> frozenset:
        return self.images[x]

    def to_json(self) -> dict:
        return {"images": {str(k): sorted(v, key=str) for k, v in self.images.items()}}

    @classmethod
    def from_json(cls, poset: FinitePoset, obj: Mapping) -> "SetValuedMap":
        by_str = {str(e): e for e in poset.elements}
        images = {by_str[k]: [by_str[str(v)] for v in vals] for k, vals in obj["images"].items()}
        return cls(poset, images)


def check_increasing_downward(poset: FinitePoset, F: SetValuedMap) -> bool:
    """Exhaustively test: ``x <= y`` and ``w in F(y)`` give ``z in F(x)`` with ``z <= w``."""
    for x, y in itertools.product(poset.elements, repeat=2):
        if not poset.leq(x, y):
            continue
        for w in F(y):
            if not any(poset.leq(z, w) for z in F(x)):
                return False
    return True


def check_increasing_upward(poset: FinitePoset, F: SetValuedMap) -> bool:
    for x, y in itertools.product(poset.elements, repeat=2):
        if not poset.leq(x, y):
            continue
        for z in F(x):
            if not any(poset.leq(z, w) for w in F(y)):
                return False
    return True


@dataclass
class FixpointResult:
    fixed_points: set
    minimal_fixed_points: set
    b_set: set
    b_minimal: set
    b_minimal_are_fixed: bool


def fixed_points_direct(poset: FinitePoset, F: SetValuedMap) -> set:
    return {x for x in poset.elements if x in F(x)}


def fixed_points_by_matrix(poset: FinitePoset, F: SetValuedMap) -> set:
    """Same set as :func:`fixed_points_direct`, read off the diagonal of the
    membership matrix ``M[i, j] = (e_j in F(e_i))``."""
    n = len(poset)
    member = np.zeros((n, n), dtype=bool)
    for i, e in enumerate(poset.elements):
        for t in F(e):
            member[i, poset.index[t]] = True
    return {poset.elements[i] for i in np.flatnonzero(member.diagonal())}


def b_set(poset: FinitePoset, F: SetValuedMap) -> set:
    return {z for z in poset.elements if any(poset.leq(v, z) for v in F(z))}


def finite_fixpoints(poset: FinitePoset, F: SetValuedMap) -> FixpointResult:
    fixed = fixed_points_direct(poset, F)
    b = b_set(poset, F)
    b_min = poset.minimal(b)
    return FixpointResult(
        fixed_points=fixed,
        minimal_fixed_points=poset.minimal(fixed),
        b_set=b,
        b_minimal=b_min,
        b_minimal_are_fixed=b_min <= fixed,
    )


@dataclass
class TheoremReport:
    hypotheses_ok: bool
    hypothesis_failures: list[str] = field(default_factory=list)
    fixed_nonempty: bool = False
    fixed_below_ystar_nonempty: bool = False
    minimal_below_ystar: bool = False
    chains_have_lower_bounds: bool = False
    b_route_agrees: bool = False

    @property
    def conclusions_hold(self) -> bool:
        return (
            self.fixed_nonempty
            and self.fixed_below_ystar_nonempty
            and self.minimal_below_ystar
            and self.chains_have_lower_bounds
            and self.b_route_agrees
        )

    def to_json(self) -> dict:
        return {
            "hypotheses_ok": self.hypotheses_ok,
            "hypothesis_failures": self.hypothesis_failures,
            "fixed_nonempty": self.fixed_nonempty,
            "fixed_below_ystar_nonempty": self.fixed_below_ystar_nonempty,
            "minimal_below_ystar": self.minimal_below_ystar,
            "chains_have_lower_bounds": self.chains_have_lower_bounds,
            "b_route_agrees": self.b_route_agrees,
            "conclusions_hold": self.conclusions_hold,
        }


def _chains_have_lower_bounds(poset: FinitePoset, subset: set) -> bool:
    items = sorted(subset, key=lambda e: poset.index[e])
    for r in range(1, len(items) + 1):
        for chain in itertools.combinations(items, r):
            if not poset.is_chain(chain):
                continue
            if not any(all(poset.leq(b, c) for c in chain) for b in subset):
                return False
    return True


def verify_theorem_5_1(poset: FinitePoset, F: SetValuedMap, y_star, v_star) -> TheoremReport:
    """Check the fixed-point existence claims for one finite instance.

    Hypotheses (``F`` increasing downward, ``v* in F(y*)``, ``v* <= y*``) are
    checked first; when any fails the report says so and the conclusions are
    still evaluated but carry no meaning.  Universal re-inductivity of the
    images and re-chain-completeness are automatic on finite posets.
    """
    failures = []
    if not check_increasing_downward(poset, F):
        failures.append("F is not increasing downward")
    if v_star not in F(y_star):
        failures.append("v* is not in F(y*)")
    elif not poset.leq(v_star, y_star):
        failures.append("v* is not below y*")

    res = finite_fixpoints(poset, F)
    below = res.fixed_points & poset.down_set(y_star)
    report = TheoremReport(hypotheses_ok=not failures, hypothesis_failures=failures)
    report.fixed_nonempty = bool(res.fixed_points)
    report.fixed_below_ystar_nonempty = bool(below)
    report.minimal_below_ystar = any(poset.leq(m, y_star) for m in res.minimal_fixed_points)
    report.chains_have_lower_bounds = (
        bool(res.fixed_points)
        and _chains_have_lower_bounds(poset, res.fixed_points)
        and bool(below)
        and _chains_have_lower_bounds(poset, below)
    )
    report.b_route_agrees = (
        res.b_minimal_are_fixed
        and res.b_minimal == res.minimal_fixed_points
        and fixed_points_by_matrix(poset, F) == res.fixed_points
    )
    return report


# --- random instances ------------------------------------------------------


def random_poset(rng: np.random.Generator, size: int, density: float | None = None) -> FinitePoset:
    """Transitive closure of a random DAG on ``size`` labelled elements."""
    if density is None:
        density = rng.uniform(0.1, 0.7)
    perm = rng.permutation(size)
    m = np.eye(size, dtype=bool)
    for a in range(size):
        for b in range(a + 1, size):
            if rng.random() < density:
                m[perm[a], perm[b]] = True
    for k in range(size):  # Warshall
        m |= m[:, [k]] & m[[k], :]
    return FinitePoset([f"e{i}" for i in range(size)], m)


def _random_monotone_floor(rng: np.random.Generator, poset: FinitePoset) -> dict:
    """A random order-preserving single-valued map, built by composing
    two-level threshold maps on random up-sets."""
    elems = poset.elements
    if rng.random() < 0.3:
        g = {e: e for e in elems}
    else:
        c = elems[int(rng.integers(len(elems)))]
        g = {e: c for e in elems}
    for _ in range(int(rng.integers(0, 3))):
        seeds = [e for e in elems if rng.random() < 0.4]
        up = {e for e in elems if any(poset.leq(s, e) for s in seeds)}
        lo = elems[int(rng.integers(len(elems)))]
        above = [e for e in elems if poset.leq(lo, e)]
        hi = above[int(rng.integers(len(above)))]
        step = {e: (hi if e in up else lo) for e in elems}
        g = {e: step[g[e]] for e in elems} if rng.random() < 0.5 else {e: g[step[e]] for e in elems}
    return g


def random_downward_map(rng: np.random.Generator, poset: FinitePoset, tries: int = 30) -> SetValuedMap:
    """A random set-valued map that is increasing downward.

    Half the time plain random maps are drawn and the first one passing the
    exhaustive check is kept; otherwise (or when rejection sampling fails) the
    map is ``F(x) = {g(x)} u S(x)`` with ``g`` monotone and ``S(x)`` a random
    subset of the up-set of ``g(x)``, which is increasing downward because
    every image has least element ``g(x)``.
    """
    elems = poset.elements
    if rng.random() < 0.5:
        for _ in range(tries):
            images = {}
            for e in elems:
                k = int(rng.integers(1, min(3, len(elems)) + 1))
                images[e] = [elems[i] for i in rng.choice(len(elems), k, replace=False)]
            F = SetValuedMap(poset, images)
            if check_increasing_downward(poset, F):
                return F
    g = _random_monotone_floor(rng, poset)
    images = {}
    for e in elems:
        above = [t for t in elems if poset.leq(g[e], t) and rng.random() < 0.3]
        images[e] = [g[e], *above]
    return SetValuedMap(poset, images)


@dataclass
class Instance:
    poset: FinitePoset
    F: SetValuedMap
    y_star: Hashable
    v_star: Hashable


def random_instance(rng: np.random.Generator, max_size: int = 6) -> Instance:
    """Random (poset, map, y*, v*) satisfying every hypothesis."""
    while True:
        poset = random_poset(rng, int(rng.integers(2, max_size + 1)))
        F = random_downward_map(rng, poset)
        starts = [(y, v) for y in poset.elements for v in sorted(F(y), key=str) if poset.leq(v, y)]
        if starts:
            y, v = starts[int(rng.integers(len(starts)))]
            return Instance(poset, F, y, v)


@dataclass
class CorpusSummary:
    instances: int
    seed: int
    conform: int
    b_route_agree: int
    failures: list[int]

    @property
    def all_conform(self) -> bool:
        return self.conform == self.instances and self.b_route_agree == self.instances

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "seed": self.seed,
            "conform": self.conform,
            "b_route_agree": self.b_route_agree,
            "failures": self.failures,
            "all_conform": self.all_conform,
        }


def run_corpus(instances: int, seed: int, max_size: int = 6) -> CorpusSummary:
    conform = agree = 0
    failures = []
    for i in range(instances):
        inst = random_instance(np.random.default_rng([seed, i]), max_size)
        rep = verify_theorem_5_1(inst.poset, inst.F, inst.y_star, inst.v_star)
        ok = rep.hypotheses_ok and rep.conclusions_hold
        conform += ok
        agree += rep.b_route_agrees
        if not ok:
            failures.append(i)
    return CorpusSummary(instances, seed, conform, agree, failures)


# --- monotone iteration on vector spaces ----------------------------------


class InitialConditionError(ValueError):
    """The selection does not move the starting point downward."""


@dataclass
class IterationTrace:
    iterates: list[np.ndarray]
    residuals: list[float]
    converged: bool
    order_violations: int
    direction: str = "down"

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "order_violations": self.order_violations,
            "final_residual": self.residuals[-1] if self.residuals else 0.0,
            "direction": self.direction,
        }


def iterate_downward(
    selection: Callable[[np.ndarray], np.ndarray],
    cone: Cone,
    y_star: VectorLike,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    keep_iterates: bool = True,
) -> IterationTrace:
    """Iterate ``x_{k+1} = selection(x_k)`` from ``x_0 = y*``.

    Requires ``selection(y*) <= y*``.  Each step checks ``x_{k+1} <= x_k`` and
    counts failures rather than stopping.  Stops once consecutive iterates are
    within ``tol`` in the cone's norm; with ``keep_iterates=False`` only the
    first and last points are retained.
    """
    x = np.array(as_array(y_star))
    p = cone.norm_kind
    first = np.asarray(selection(x), dtype=float)
    if not leq(cone, first, x, BOUNDARY_TOL):
        raise InitialConditionError("selection(y*) is not below y*")
    iterates = [x]
    residuals: list[float] = []
    violations = 0
    nxt = first
    converged = False
    for _ in range(max_iter):
        if not leq(cone, nxt, x, BOUNDARY_TOL):
            violations += 1
        r = norm(nxt - x, p)
        residuals.append(r)
        x = nxt
        if keep_iterates:
            iterates.append(x)
        if r <= tol:
            converged = True
            break
        nxt = np.asarray(selection(x), dtype=float)
    if not keep_iterates:
        iterates.append(x)
    return IterationTrace(iterates, residuals, converged, violations)


def iterate_upward(
    selection: Callable[[np.ndarray], np.ndarray],
    cone: Cone,
    start: VectorLike,
    ceiling: VectorLike | None = None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    keep_iterates: bool = True,
) -> IterationTrace:
    """Mirror image of :func:`iterate_downward`: an increasing chain from
    ``start``, counting steps that go down or overshoot ``ceiling``."""
    x = np.array(as_array(start))
    top = None if ceiling is None else as_array(ceiling)
    p = cone.norm_kind
    iterates = [x]
    residuals: list[float] = []
    violations = 0
    converged = False
    for _ in range(max_iter):
        nxt = np.asarray(selection(x), dtype=float)
        if not leq(cone, x, nxt, BOUNDARY_TOL):
            violations += 1
        if top is not None and not leq(cone, nxt, top, BOUNDARY_TOL):
            violations += 1
        r = norm(nxt - x, p)
        residuals.append(r)
        x = nxt
        if keep_iterates:
            iterates.append(x)
        if r <= tol:
            converged = True
            break
    if not keep_iterates:
        iterates.append(x)
    return IterationTrace(iterates, residuals, converged, violations, direction="up")
