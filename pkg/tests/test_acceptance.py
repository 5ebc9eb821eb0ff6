"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (outside pytest's capture)
before asserting, so ``pytest -v`` output doubles as the acceptance log.
"""

import itertools
import math
import time

import numpy as np
import pytest

from isocone.bestapprox_vi import certificates, random_affine_instance, solve_best_approx_down
from isocone.circular_cone import (
    brute_force_projection,
    monotonicity_witness,
    project_circular,
    verify_projection_vi,
)
from isocone.isotone_check import check_downward, check_upward
from isocone.lp_cone import (
    check_orthogonal,
    check_subdual,
    coordinate_descent_projection,
    project_lp,
    verify_lemma_7_1,
)
from isocone.order_core import SUP, CircularCone, OrthantCone, leq
from isocone.order_fixpoint import run_corpus
from isocone.supnorm_cone import in_projection_set, projection_set

from oracles import lcp_fixed_point, quarter_grid, sup_membership_grid, witness_ratio_exact

SQ2 = math.sqrt(2.0)


@pytest.fixture
def record(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_counterexample(record):
    t0 = time.perf_counter()
    rep = monotonicity_witness()
    elapsed = time.perf_counter() - t0
    c = (1 + SQ2) / 2
    pu_ok = np.max(np.abs(rep.pu - [c, c, 0.0])) <= 1e-12
    pv_ok = np.max(np.abs(rep.pv - [0.5, 1 / (2 * SQ2), 1 / (2 * SQ2)])) <= 1e-12
    margin = SQ2 / 2 - rep.ratio
    ok = (
        rep.order_holds_on_inputs
        and not rep.order_holds_on_outputs
        and pu_ok
        and pv_ok
        and margin >= 0.09
        and abs(rep.ratio - witness_ratio_exact()) <= 1e-12
        and elapsed < 0.1
    )
    record(1, ok, f"leq(v,u)={rep.order_holds_on_inputs}, P(u)/P(v) within 1e-12: {pu_ok}/{pv_ok}, "
                  f"ratio={rep.ratio:.10f}, margin={margin:.4f}, {elapsed * 1e3:.2f} ms")


def test_criterion_2_projection_oracle(record):
    t0 = time.perf_counter()
    cone = CircularCone.standard(3)
    rng = np.random.default_rng(2024)
    points = rng.normal(size=(1000, 3)) * rng.uniform(0.1, 5.0, (1000, 1))
    dev = orth = 0.0
    vi_min = math.inf
    for i, u in enumerate(points):
        w = project_circular(cone, u)
        dev = max(dev, float(np.max(np.abs(w - brute_force_projection(cone, u)))))
        chk = verify_projection_vi(cone, u, w, 200, i)
        orth = max(orth, chk.orthogonality_residual)
        vi_min = min(vi_min, chk.min_inner)
    elapsed = time.perf_counter() - t0
    ok = dev <= 1e-4 and orth <= 1e-12 and vi_min >= -1e-9 and elapsed <= 30
    record(2, ok, f"max deviation {dev:.2e}, |<w,w-u>| max {orth:.2e}, VI min {vi_min:.2e}, {elapsed:.1f} s")


def test_criterion_3_sup_projection_sets(record):
    xs_vals = np.array([-2, -1, -0.5, 0, 0.5, 1, 2], dtype=float)
    z_vals = quarter_grid(-0.25, 2.25)
    pairs = mismatches = rep_failures = 0
    for dim in (1, 2, 3):
        xs = np.array(list(itertools.product(xs_vals, repeat=dim)))
        zs = np.array(list(itertools.product(z_vals, repeat=dim)))
        oracle, best = sup_membership_grid(xs, zs)
        for i, x in enumerate(xs):
            ps = projection_set(x)
            if best[i] != ps.profile.lam:
                rep_failures += 1
            for rep in (ps.plus_part, ps.smallest, ps.largest):
                if np.max(np.abs(rep - x)) != ps.profile.lam:
                    rep_failures += 1
            for j, z in enumerate(zs):
                pairs += 1
                mismatches += in_projection_set(x, z) != oracle[i, j]
    ok = pairs >= 100_000 and mismatches == 0 and rep_failures == 0
    record(3, ok, f"{pairs} (x,z) pairs, {mismatches} disagreements, {rep_failures} representative failures")


def test_criterion_4_isotonicity_verdicts(record):
    notes = []
    sup = OrthantCone(2, SUP)
    down = check_downward(sup, 1000, 42)
    up = check_upward(sup, 1000, 42)
    stored = [v for v in up.violations if v.index == -1]
    sup_ok = (
        down.verdict == "holds_on_samples"
        and up.verdict == "violated"
        and len(stored) == 1
        and stored[0].x.tolist() == [-2, 0]
        and stored[0].y.tolist() == [0, 0]
    )
    notes.append(f"sup down={down.verdict} up={up.verdict}")
    lp_ok = True
    for p in (1.0, 1.5, 2.0, 3.0):
        for check in (check_downward, check_upward):
            lp_ok &= check(OrthantCone(4, p), 1000, 7).verdict == "holds_on_samples"
    notes.append(f"lp both ways hold={lp_ok}")
    circ_ok = True
    for seed in range(5):
        for check in (check_downward, check_upward):
            rep = check(CircularCone.standard(3), 1000, seed)
            circ_ok &= rep.verdict == "violated" and any(v.index == -1 for v in rep.violations)
    notes.append(f"circular witness always found={circ_ok}")
    record(4, sup_ok and lp_ok and circ_ok, "; ".join(notes))


def test_criterion_5_lp_duality(record):
    worst_orth, worst_sub, worst_lemma, worst_opt = 0.0, math.inf, math.inf, 0.0
    for p in (1.5, 2.0, 3.0):
        worst_orth = max(worst_orth, check_orthogonal(p, 10_000, 11, max_dim=6).max_residual)
        worst_sub = min(worst_sub, check_subdual(p, 10_000, 12, max_dim=6).min_inner)
        rng = np.random.default_rng(13)
        for k in range(40):
            x = rng.normal(size=int(rng.integers(1, 7))) * 3
            rep = verify_lemma_7_1(x, p, 10_000, k)
            worst_lemma = min(worst_lemma, rep.min_inner, -rep.support_residual)
            ref = coordinate_descent_projection(x, p)
            worst_opt = max(worst_opt, float(np.max(np.abs(project_lp(x) - ref))))
    ok = worst_orth <= 1e-12 and worst_sub >= -1e-12 and worst_lemma >= -1e-12 and worst_opt <= 1e-6
    record(5, ok, f"orthogonality {worst_orth:.1e}, subdual min {worst_sub:.1e}, "
                  f"Lemma min {worst_lemma:.1e}, x+ vs minimizer {worst_opt:.1e}")


def test_criterion_6_finite_fixpoints(record):
    t0 = time.perf_counter()
    summary = run_corpus(10_000, 2024)
    elapsed = time.perf_counter() - t0
    ok = summary.all_conform and elapsed <= 60
    record(6, ok, f"{summary.conform}/{summary.instances} conform, B-route agrees on "
                  f"{summary.b_route_agree}, {elapsed:.1f} s")


def _affine_corpus():
    rng = np.random.default_rng(77)
    for _ in range(200):
        f, y = random_affine_instance(rng, int(rng.integers(1, 11)), radius=rng.uniform(0.05, 0.8))
        yield f, y


def test_criterion_7_best_approximation(record):
    worst = {"gap": 0.0, "comp": 0.0, "paths": 0.0, "oracle": 0.0}
    converged = below = 0
    for f, y in _affine_corpus():
        cone = OrthantCone(f.dim)
        smallest = solve_best_approx_down(cone, f, y, tol=1e-12, selection="smallest")
        plus = solve_best_approx_down(cone, f, y, tol=1e-12, selection="plus")
        converged += smallest.converged and plus.converged and smallest.trace.iterations <= 100_000
        below += leq(cone, smallest.x_star, y, 0.0)
        worst["gap"] = max(worst["gap"], smallest.certificate_gap)
        worst["comp"] = max(worst["comp"], smallest.complementarity_residual)
        worst["paths"] = max(worst["paths"], float(np.max(np.abs(smallest.x_star - plus.x_star))))
        ref = lcp_fixed_point(f.A, f.b)
        worst["oracle"] = max(worst["oracle"], float(np.max(np.abs(smallest.x_star - ref))))
    ok = (
        converged == 200
        and below == 200
        and worst["gap"] <= 1e-8
        and worst["comp"] <= 1e-8
        and worst["paths"] <= 1e-9
        and worst["oracle"] <= 1e-8
    )
    record(7, ok, f"converged {converged}/200, x*<=y* {below}/200, distance gap {worst['gap']:.1e}, "
                  f"complementarity {worst['comp']:.1e}, smallest vs plus {worst['paths']:.1e}, "
                  f"vs active-set oracle {worst['oracle']:.1e}")


def test_criterion_8_certificate_equivalence(record):
    agree = perturbed_fail = total = 0
    for f, y in _affine_corpus():
        cone = OrthantCone(f.dim)
        r = solve_best_approx_down(cone, f, y, tol=1e-12)
        if not r.converged:
            continue
        total += 1
        at = certificates(cone, f, r.x_star, 1e-8)
        off = certificates(cone, f, r.x_star + 1e-3, 1e-8)
        agree += at.agree and at.fixed_point and off.agree
        perturbed_fail += not (off.fixed_point or off.best_approx or off.complementarity)
    ok = total == 200 and agree == total and perturbed_fail == total
    record(8, ok, f"{agree}/{total} agree (all pass at x*, all fail at x*+1e-3: {perturbed_fail}/{total})")
