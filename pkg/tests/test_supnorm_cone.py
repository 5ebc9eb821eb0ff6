import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from isocone.order_core import DimensionMismatch
from isocone.supnorm_cone import (
    distance_to_cone,
    in_projection_set,
    largest_projection,
    plus_part,
    profile,
    projection_set,
    smallest_projection,
)

from oracles import quarter_grid, sup_membership_grid

quarters = st.integers(-12, 12).map(lambda k: k / 4.0)


def qvec(n):
    return arrays(np.float64, n, elements=quarters)


@pytest.mark.parametrize(
    "x, zeta, lam, xi",
    [((-2, 1, -1), (0, 2), 2.0, (0,)), ((1, 2), (), 0.0, ()), ((0, 5), (0,), 0.0, (0,))],
)
def test_profile(x, zeta, lam, xi):
    prof = profile(x)
    assert (prof.zeta, prof.lam, prof.xi) == (zeta, lam, xi)


def test_membership_examples():
    x = (-2.0, 1.0, -1.0)
    assert in_projection_set(x, (0, 3, 1))
    assert not in_projection_set(x, (0, 3.5, 0))
    assert in_projection_set((1, 2), (1, 2))
    assert not in_projection_set((1, 2), (1, 2.25))
    with pytest.raises(DimensionMismatch):
        in_projection_set((1, 2), (1, 2, 3))


@pytest.mark.parametrize(
    "x, lo, hi",
    [((-2, 1, -1), (0, 0, 0), (0, 3, 1)), ((-1, 5), (0, 4), (0, 6)), ((-2, 0), (0, 0), (0, 2))],
)
def test_extreme_members(x, lo, hi):
    assert smallest_projection(x).tolist() == list(lo)
    assert largest_projection(x).tolist() == list(hi)


def test_plus_and_distance():
    assert plus_part((-2, 1, -1)).tolist() == [0, 1, 0]
    assert plus_part((-1, -1)).tolist() == [0, 0]
    assert distance_to_cone((-2, 1, -1)) == 2.0
    assert distance_to_cone((-3,)) == 3.0
    assert distance_to_cone((0.5, 2)) == 0.0


@pytest.mark.parametrize("x", [(-2, 1, -1), (-1, 5), (-0.5, 0.25, -0.5)])
def test_extremes_by_brute_force(x):
    # among all grid members, smallest/largest are the componentwise bounds
    x = np.array(x, dtype=float)
    grid = np.array(list(itertools.product(quarter_grid(-0.5, 7), repeat=x.size)))
    member, _ = sup_membership_grid(x[None, :], grid)
    members = grid[member[0]]
    assert members.min(axis=0).tolist() == smallest_projection(x).tolist()
    assert members.max(axis=0).tolist() == largest_projection(x).tolist()


@given(qvec(3))
def test_representatives_are_members(x):
    ps = projection_set(x)
    lam = ps.profile.lam
    for rep in (ps.plus_part, ps.smallest, ps.largest):
        assert ps.contains(rep, 1e-12)
        assert np.max(np.abs(rep - x)) == lam
    assert np.all(ps.smallest <= ps.plus_part) and np.all(ps.plus_part <= ps.largest)
    assert ps.is_singleton == (lam == 0.0)


@given(qvec(2), qvec(2))
def test_membership_matches_grid_oracle(x, z):
    member, _ = sup_membership_grid(x[None, :], np.vstack([z, smallest_projection(x)]))
    # the smallest member guarantees the oracle grid holds a true nearest point
    assert bool(member[0, 0]) == in_projection_set(x, z)


def test_json_payload():
    out = projection_set((-2, 1, -1)).to_json()
    assert out["profile"] == {"zeta": [0, 2], "lambda": 2.0, "xi": [0]}
    assert out["smallest"] == [0, 0, 0] and out["largest"] == [0, 3, 1]
    assert out["distance"] == 2.0 and not out["singleton"]
