import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isocone.order_core import OrthantCone
from isocone.order_fixpoint import (
    FinitePoset,
    InitialConditionError,
    PosetError,
    SetValuedMap,
    check_increasing_downward,
    check_increasing_upward,
    finite_fixpoints,
    fixed_points_by_matrix,
    iterate_downward,
    iterate_upward,
    random_instance,
    random_poset,
    run_corpus,
    verify_theorem_5_1,
)

from oracles import downward_increasing_brute, least_fixed_points_by_chain


def chain(*labels):
    n = len(labels)
    return FinitePoset(labels, [[i <= j for j in range(n)] for i in range(n)])


def test_poset_validation():
    with pytest.raises(PosetError):
        FinitePoset("ab", [[True, True], [True, True]])
    with pytest.raises(PosetError):
        FinitePoset("ab", [[False, True], [False, True]])
    with pytest.raises(PosetError):
        FinitePoset("abc", [[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    with pytest.raises(PosetError):
        FinitePoset("aa", np.eye(2))


def test_increasing_examples():
    P = chain("a", "b")
    assert check_increasing_downward(P, SetValuedMap(P, {"a": ["a"], "b": ["b"]}))
    assert not check_increasing_downward(P, SetValuedMap(P, {"a": ["b"], "b": ["a"]}))
    anti = FinitePoset("ab", np.eye(2, dtype=bool))
    F = SetValuedMap(anti, {"a": ["b"], "b": ["a"]})
    assert check_increasing_downward(anti, F) and check_increasing_upward(anti, F)


def test_set_valued_map_validation():
    P = chain("a", "b")
    with pytest.raises(ValueError):
        SetValuedMap(P, {"a": ["a"]})
    with pytest.raises(ValueError):
        SetValuedMap(P, {"a": [], "b": ["a"]})
    with pytest.raises(ValueError):
        SetValuedMap(P, {"a": ["z"], "b": ["a"]})


def test_fixed_point_examples():
    P = FinitePoset("abc", [[1, 1, 1], [0, 1, 0], [0, 0, 1]])
    ident = SetValuedMap(P, {e: [e] for e in "abc"})
    res = finite_fixpoints(P, ident)
    assert res.fixed_points == {"a", "b", "c"} and res.minimal_fixed_points == {"a"}
    const = SetValuedMap(chain("m", "x", "y"), {e: ["m"] for e in "mxy"})
    assert finite_fixpoints(const.poset, const).fixed_points == {"m"}


def test_theorem_on_singleton_and_adversarial():
    P = chain("o")
    assert verify_theorem_5_1(P, SetValuedMap(P, {"o": ["o"]}), "o", "o").conclusions_hold
    Q = chain("a", "b")
    bad = SetValuedMap(Q, {"a": ["b"], "b": ["a"]})
    rep = verify_theorem_5_1(Q, bad, "b", "a")
    assert not rep.hypotheses_ok
    assert "F is not increasing downward" in rep.hypothesis_failures


@given(st.integers(0, 10_000))
def test_random_instances_against_oracles(seed):
    inst = random_instance(np.random.default_rng(seed), 6)
    P, F = inst.poset, inst.F
    images = {e: F(e) for e in P.elements}
    assert downward_increasing_brute(P.leq, P.elements, images)
    assert inst.v_star in F(inst.y_star) and P.leq(inst.v_star, inst.y_star)
    rep = verify_theorem_5_1(P, F, inst.y_star, inst.v_star)
    assert rep.hypotheses_ok and rep.conclusions_hold
    # walking down from y* through members below the current point ends in fixed points
    reached = least_fixed_points_by_chain(P.leq, P.elements, images, inst.y_star)
    res = finite_fixpoints(P, F)
    assert reached and reached <= res.fixed_points & P.down_set(inst.y_star)
    assert fixed_points_by_matrix(P, F) == res.fixed_points


def test_random_poset_is_order():
    rng = np.random.default_rng(0)
    for _ in range(50):
        P = random_poset(rng, int(rng.integers(1, 8)))
        m = P.leq_matrix
        assert m.diagonal().all()


def test_corpus_small():
    s = run_corpus(300, 4)
    assert s.all_conform and s.failures == []
    assert s.to_json()["instances"] == 300


def test_json_roundtrip():
    P = FinitePoset([1, 2], [[True, True], [False, True]])
    F = SetValuedMap(P, {1: [1], 2: [1, 2]})
    P2 = FinitePoset.from_json(P.to_json())
    F2 = SetValuedMap.from_json(P2, F.to_json())
    assert F2(2) == frozenset({1, 2})


def test_iterate_identity_stops_at_once():
    y = np.array([1.0, 2.0])
    tr = iterate_downward(lambda x: x, OrthantCone(2), y)
    assert tr.converged and tr.iterations == 1 and tr.final.tolist() == [1, 2]


def test_iterate_geometric():
    tr = iterate_downward(lambda x: 0.5 * x, OrthantCone(2), [1.0, 1.0], tol=1e-12)
    assert tr.converged and np.max(np.abs(tr.final)) < 1e-11
    ratios = np.array(tr.residuals[1:]) / np.array(tr.residuals[:-1])
    np.testing.assert_allclose(ratios, 0.5, rtol=1e-12)
    for k, x in enumerate(tr.iterates[:5]):
        np.testing.assert_allclose(x, 0.5**k, rtol=1e-15)
    assert tr.order_violations == 0


def test_iterate_affine_against_linear_solve():
    A = np.array([[0.2, 0.3], [0.1, 0.4]])
    b = np.array([1.0, 0.5])
    y = np.linalg.solve(np.eye(2) - A, b) + 1.0
    tr = iterate_downward(lambda x: A @ x + b, OrthantCone(2), y, tol=1e-13)
    np.testing.assert_allclose(tr.final, np.linalg.solve(np.eye(2) - A, b), atol=1e-11)


def test_iterate_downward_precondition():
    with pytest.raises(InitialConditionError):
        iterate_downward(lambda x: x + 1, OrthantCone(1), [0.0])


def test_iterate_upward():
    tr = iterate_upward(lambda x: 0.5 * x + 1.0, OrthantCone(2), np.zeros(2), [2.0, 2.0], tol=1e-12)
    assert tr.converged and tr.order_violations == 0 and tr.direction == "up"
    np.testing.assert_allclose(tr.final, [2.0, 2.0], atol=1e-11)
    s = tr.summary()
    assert s["iterations"] == tr.iterations and s["direction"] == "up"
