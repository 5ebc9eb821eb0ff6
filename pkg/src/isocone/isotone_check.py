"""Empirical audit of order-monotonicity of cone projections.

A set-valued map ``F`` is *increasing downward* when ``x <= y`` implies that
every ``w in F(y)`` dominates some ``z in F(x)``, and *increasing upward* when
every ``z in F(x)`` is dominated by some ``w in F(y)``.  For a single-valued
map both reduce to ``F(x) <= F(y)``.

The sup-norm projection sets have componentwise least and greatest elements,
so the quantified conditions collapse to

    downward:  smallest(x) <= smallest(y)
    upward:    largest(x)  <= largest(y)

(every member of ``F(y)`` dominates ``smallest(y)``; every member of ``F(x)``
is dominated by ``largest(x)``).  Sampling can only find violations; a clean
run is reported as ``holds_on_samples``, never as a proof.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circular_cone import RIGHT_ANGLE_HALF, WITNESS_U, WITNESS_V
from .order_core import BOUNDARY_TOL, CircularCone, Cone, OrthantCone, leq
from .projections import in_projection, is_single_valued, largest_member, project, smallest_member

DIRECTIONS = ("down", "up")


@dataclass(frozen=True)
class Violation:
    index: int
    x: np.ndarray
    y: np.ndarray
    witness_member: np.ndarray
    explanation: str

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "witness_member": self.witness_member.tolist(),
            "explanation": self.explanation,
        }


@dataclass
class IsotoneReport:
    cone: Cone
    direction: str
    seed: int
    pairs_tested: int
    injected: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "violated" if self.violations else "holds_on_samples"

    def to_json(self) -> dict:
        return {
            "cone": self.cone.to_json(),
            "direction": self.direction,
            "seed": self.seed,
            "pairs_tested": self.pairs_tested,
            "injected": self.injected,
            "verdict": self.verdict,
            "violations": [v.to_json() for v in self.violations],
        }


def _order_tol(cone: Cone) -> float:
    # orthant comparisons are exact; circular ones absorb boundary rounding
    return BOUNDARY_TOL if isinstance(cone, CircularCone) else 0.0


def sample_ordered_pair(cone: Cone, seed: int, index: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic pair ``x <= y`` drawn as ``y = x + k`` with ``k`` in the cone."""
    rng = np.random.default_rng([seed, index])
    d = cone.dim
    x = rng.uniform(-5.0, 5.0, d)
    if rng.random() < 0.02:
        return x, x.copy()
    if isinstance(cone, OrthantCone):
        k = rng.uniform(0.0, 5.0, d) * (rng.random(d) < 0.8)
    else:
        g = rng.standard_normal(d)
        g -= np.dot(g, cone.axis) * cone.axis
        ng = np.linalg.norm(g)
        perp = g / ng if ng > 0 else np.zeros(d)
        theta = cone.half_angle if rng.random() < 0.5 else rng.uniform(0.0, cone.half_angle)
        k = rng.uniform(0.0, 5.0) * (math.cos(theta) * cone.axis + math.sin(theta) * perp)
    return x, x + k


def _householder_to(n: np.ndarray) -> np.ndarray:
    """Orthogonal matrix sending ``e_1`` to the unit vector ``n``."""
    e1 = np.zeros(n.size)
    e1[0] = 1.0
    v = e1 - n
    vv = float(np.dot(v, v))
    if vv == 0.0:
        return np.eye(n.size)
    return np.eye(n.size) - 2.0 * np.outer(v, v) / vv


def known_witnesses(cone: Cone) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stored pairs ``x <= y`` injected into every run for this cone family.

    * right-angled circular cones in dimension >= 3: the classic pair
      ``v <= u`` rotated so that ``e_1`` maps onto the cone axis;
    * the sup-norm orthant: ``x = (-2, 0, ..., 0)``, ``y = 0``, whose greatest
      projection ``(0, 2, ..., 2)`` has nothing above it in ``P(y) = {0}``.
    """
    if isinstance(cone, CircularCone):
        if cone.half_angle != RIGHT_ANGLE_HALF or cone.dim < 3:
            return []
        h = _householder_to(cone.axis)
        u = np.zeros(cone.dim)
        v = np.zeros(cone.dim)
        u[:3], v[:3] = WITNESS_U, WITNESS_V
        return [(h @ v, h @ u)]
    if cone.is_sup and cone.dim >= 2:
        x = np.zeros(cone.dim)
        x[0] = -2.0
        return [(x, np.zeros(cone.dim))]
    return []


def evaluate_pair(cone: Cone, direction: str, index: int, x: np.ndarray, y: np.ndarray) -> Violation | None:
    """Test one ordered pair; return a violation record or ``None``."""
    tol = _order_tol(cone)
    if is_single_valued(cone):
        px, py = project(cone, x), project(cone, y)
        if leq(cone, px, py, tol):
            return None
        if direction == "down":
            return Violation(index, x, y, py, "P(y) dominates no member of the singleton P(x)")
        return Violation(index, x, y, px, "P(x) is dominated by no member of the singleton P(y)")
    if direction == "down":
        lo_x, lo_y = smallest_member(cone, x), smallest_member(cone, y)
        if leq(cone, lo_x, lo_y, tol):
            return None
        return Violation(
            index, x, y, lo_y, "least member of P(y) does not dominate least member of P(x)"
        )
    hi_x, hi_y = largest_member(cone, x), largest_member(cone, y)
    if leq(cone, hi_x, hi_y, tol):
        return None
    return Violation(
        index, x, y, hi_x, "greatest member of P(x) is not dominated by greatest member of P(y)"
    )


def recheck_violation(cone: Cone, direction: str, v: Violation) -> bool:
    """Independently confirm a stored violation from its fields alone.

    Membership of the witness uses ``BOUNDARY_TOL`` slack: ``x + lam`` can
    overshoot ``|z - x| <= lam`` by one rounding step.
    """
    tol = _order_tol(cone)
    if not leq(cone, v.x, v.y, tol):
        return False
    if is_single_valued(cone):
        px, py = project(cone, v.x), project(cone, v.y)
        member = py if direction == "down" else px
        return np.array_equal(member, v.witness_member) and not leq(cone, px, py, tol)
    if direction == "down":
        # w in P(y) with no z in P(x) below it: smallest(x) is the only candidate
        return in_projection(cone, v.y, v.witness_member, BOUNDARY_TOL) and not leq(
            cone, smallest_member(cone, v.x), v.witness_member, tol
        )
    return in_projection(cone, v.x, v.witness_member, BOUNDARY_TOL) and not leq(
        cone, v.witness_member, largest_member(cone, v.y), tol
    )


def _check(cone: Cone, direction: str, pair_count: int, seed: int, workers: int) -> IsotoneReport:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    injected = known_witnesses(cone)
    jobs = [(-1 - i, x, y) for i, (x, y) in enumerate(injected)]
    jobs += [(i, *sample_ordered_pair(cone, seed, i)) for i in range(pair_count)]

    def run(job):
        return evaluate_pair(cone, direction, *job)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    return IsotoneReport(
        cone=cone,
        direction=direction,
        seed=seed,
        pairs_tested=len(jobs),
        injected=len(injected),
        violations=[r for r in results if r is not None],
    )


def check_downward(cone: Cone, pair_count: int = 1000, seed: int = 0, workers: int = 1) -> IsotoneReport:
    return _check(cone, "down", pair_count, seed, workers)


def check_upward(cone: Cone, pair_count: int = 1000, seed: int = 0, workers: int = 1) -> IsotoneReport:
    return _check(cone, "up", pair_count, seed, workers)
