"""Command-line front end.

Every command builds a run report ``{command, config_echo, seed, results,
wall_time_ms, version}``.  A short human summary goes to stdout; ``--json``
prints the report instead and ``--out FILE`` writes it to disk.

Exit codes: 0 success, 1 verdict failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bestapprox_vi import (
    AffineMap,
    certificates,
    map_from_json,
    random_affine_instance,
    solve_best_approx_down,
    solve_best_approx_up,
    verify_vi,
)
from .circular_cone import (
    WitnessFailure,
    classify_region,
    monotonicity_witness,
    project_circular,
    verify_projection_vi,
)
from .isotone_check import check_downward, check_upward
from .lp_cone import verify_lemma_7_1
from .order_core import SUP, CircularCone, OrthantCone, RealVector, cone_from_json, leq
from .order_fixpoint import (
    FinitePoset,
    SetValuedMap,
    finite_fixpoints,
    run_corpus,
    verify_theorem_5_1,
)
from .projections import distance_to_cone, in_projection, project
from .supnorm_cone import projection_set

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class VerdictFailure(Exception):
    pass


# --- input handling --------------------------------------------------------


def load_schema(name: str) -> dict:
    text = resources.files("isocone").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(obj, schema: str):
    try:
        jsonschema.validate(obj, load_schema(schema))
    except jsonschema.ValidationError as exc:
        raise InputError(f"{schema} JSON invalid: {exc.message}") from exc
    return obj


def read_json(source: str):
    """Parse ``source`` as inline JSON when it looks like JSON, else as a file path."""
    try:
        if source.lstrip().startswith(("[", "{", '"')):
            return json.loads(source)
        return json.loads(Path(source).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {source}: {exc}") from exc


def read_vector(source: str) -> np.ndarray:
    obj = validate(read_json(source), "vector")
    return np.array(RealVector.from_json(obj).entries)


SHORTHANDS = ("circular", "orthant-sup", "orthant-lp")


def make_cone(spec: str, dim: int | None, p: float = 2.0, half_angle: float | None = None):
    """Cone from a shorthand name or a descriptor file/inline JSON."""
    if spec in SHORTHANDS:
        if dim is None:
            raise InputError(f"shorthand cone {spec!r} needs a dimension")
        if spec == "circular":
            return CircularCone.standard(dim, half_angle or math.pi / 4)
        return OrthantCone(dim, SUP if spec == "orthant-sup" else p)
    obj = validate(read_json(spec), "cone")
    if obj["type"] == "circular":
        n = np.array(obj["axis"], dtype=float)
        nn = np.linalg.norm(n)
        if nn == 0:
            raise InputError("cone axis must be nonzero")
        obj = dict(obj, axis=(n / nn).tolist())
    return cone_from_json(obj)


def check_dim(cone, *vectors):
    for v in vectors:
        if v.size != cone.dim:
            raise InputError(f"dimension mismatch: cone has {cone.dim}, vector has {v.size}")


# --- commands --------------------------------------------------------------


def cmd_project(args):
    x = read_vector(args.point)
    cone = make_cone(args.cone or "orthant-lp", args.dim or x.size, args.p)
    check_dim(cone, x)
    if isinstance(cone, CircularCone):
        w = project_circular(cone, x)
        chk = verify_projection_vi(cone, x, w, args.samples, args.seed)
        res = {
            "cone": cone.to_json(),
            "region": classify_region(cone, x).value,
            "projection": w.tolist(),
            "vi_min_inner": chk.min_inner,
            "orthogonality_residual": chk.orthogonality_residual,
        }
    elif cone.is_sup:
        ps = projection_set(x)
        res = {
            "cone": cone.to_json(),
            "representative": args.representative,
            "projection": project(cone, x, args.representative).tolist(),
            **ps.to_json(),
        }
    else:
        res = {
            "cone": cone.to_json(),
            "projection": project(cone, x).tolist(),
            "distance": distance_to_cone(cone, x),
        }
    return res, f"P({x.tolist()}) = {res['projection']}"


def cmd_membership(args):
    x, z = read_vector(args.point), read_vector(args.candidate)
    cone = make_cone(args.cone or "orthant-sup", args.dim or x.size, args.p)
    check_dim(cone, x, z)
    member = in_projection(cone, x, z, args.tol)
    res = {"cone": cone.to_json(), "point": x.tolist(), "candidate": z.tolist(), "member": member}
    if isinstance(cone, OrthantCone) and cone.is_sup:
        res.update(projection_set(x).to_json())
    return res, f"{z.tolist()} {'is' if member else 'is not'} in P({x.tolist()})"


def cmd_counterexample(args):
    try:
        rep = monotonicity_witness()
    except WitnessFailure as exc:
        raise VerdictFailure(str(exc)) from exc
    res = rep.to_json()
    if args.ratio_only:
        return res, repr(rep.ratio)
    reproduced = rep.order_holds_on_inputs and not rep.order_holds_on_outputs
    text = json.dumps(res, indent=2)
    if not reproduced:
        raise VerdictFailure("counterexample did not reproduce:\n" + text)
    return res, text


def cmd_isotone_check(args):
    cone = make_cone(args.cone or "circular", args.dim or 3, args.p)
    check = check_downward if args.direction == "down" else check_upward
    rep = check(cone, args.pairs, args.seed, args.workers)
    res = rep.to_json()
    text = (
        f"{args.direction}: {rep.verdict} ({rep.pairs_tested} pairs, "
        f"{len(rep.violations)} violations)"
    )
    if args.expect and args.expect != rep.verdict:
        raise VerdictFailure(f"expected {args.expect}, got {rep.verdict}")
    return res, text


def _label(poset: FinitePoset, raw):
    by_str = {str(e): e for e in poset.elements}
    if str(raw) not in by_str:
        raise InputError(f"{raw!r} is not an element of the poset")
    return by_str[str(raw)]


def cmd_fixpoint(args):
    pobj = validate(read_json(args.poset), "poset")
    mobj = validate(read_json(args.map), "setmap")
    try:
        poset = FinitePoset.from_json(pobj)
        F = SetValuedMap.from_json(poset, mobj)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if args.ystar is None:
        starts = [(y, v) for y in poset.elements for v in sorted(F(y), key=str) if poset.leq(v, y)]
        if not starts:
            raise InputError("no y* with some v* in F(y*) below it; pass --ystar/--vstar")
        y, v = starts[0]
    else:
        y = _label(poset, args.ystar)
        v = _label(poset, args.vstar) if args.vstar is not None else next(
            (t for t in sorted(F(y), key=str) if poset.leq(t, y)), None
        )
        if v is None:
            raise InputError("F(y*) has no member below y*; pass --vstar")
    fx = finite_fixpoints(poset, F)
    rep = verify_theorem_5_1(poset, F, y, v)
    order = lambda s: sorted(s, key=lambda e: poset.index[e])  # noqa: E731
    res = {
        "y_star": y,
        "v_star": v,
        "fixed_points": order(fx.fixed_points),
        "minimal_fixed_points": order(fx.minimal_fixed_points),
        "b_set": order(fx.b_set),
        "theorem": rep.to_json(),
    }
    text = f"fixed points {res['fixed_points']}, minimal {res['minimal_fixed_points']}"
    if not (rep.hypotheses_ok and rep.conclusions_hold):
        raise VerdictFailure(text + f"\nhypotheses/conclusions failed: {rep.to_json()}")
    return res, text


def cmd_fixpoint_corpus(args):
    summary = run_corpus(args.instances, args.seed, args.max_size)
    text = f"{summary.conform}/{summary.instances} conform, B-route agrees on {summary.b_route_agree}"
    if not summary.all_conform:
        raise VerdictFailure(text)
    return summary.to_json(), text


def _auto_ystar(f, dim: int) -> np.ndarray:
    if isinstance(f, AffineMap) and max(abs(np.linalg.eigvals(f.A))) < 1.0:
        y = np.linalg.solve(np.eye(dim) - f.A, np.abs(f.b) + 1.0)
        return np.maximum(y, 0.0)
    # generic fallback: scan multiples of the all-ones vector
    t = 1.0
    while t <= 1e12:
        y = np.full(dim, t)
        if np.all(f(y) <= y):
            return y
        t *= 2.0
    raise InputError("could not find y* >= 0 with f(y*) <= y*; pass --ystar")


def cmd_bestapprox(args):
    p = SUP if args.space == "sup" else args.p
    if args.map is None:
        f, y_auto = random_affine_instance(np.random.default_rng(args.seed), args.dim)
    else:
        f = map_from_json(validate(read_json(args.map), "map"))
        y_auto = None
    cone = OrthantCone(f.dim, p)
    if args.dim is not None and args.dim != f.dim:
        raise InputError(f"--dim {args.dim} does not match the map dimension {f.dim}")
    if args.ystar == "auto":
        y = y_auto if y_auto is not None else _auto_ystar(f, f.dim)
    else:
        y = read_vector(args.ystar)
        check_dim(cone, y)
    if args.direction == "down":
        r = solve_best_approx_down(
            cone, f, y, args.tol, args.max_iter, args.selection, args.samples, args.seed
        )
    else:
        r = solve_best_approx_up(cone, f, y, args.tol, args.max_iter, args.samples, args.seed)
    res = {"map": f.to_json(), "y_star": np.asarray(y).tolist(), **r.to_json()}
    if r.converged and not cone.is_sup and p == 2.0:
        cert = certificates(cone, f, r.x_star, args.tol)
        res["certificates"] = {
            "fixed_point": cert.fixed_point,
            "best_approx": cert.best_approx,
            "complementarity": cert.complementarity,
            "agree": cert.agree,
        }
    if not r.converged:
        raise VerdictFailure(f"no convergence after {r.trace.iterations} iterations")
    text = (
        f"x* = {r.x_star.tolist()} after {r.trace.iterations} iterations; "
        f"distance gap {r.certificate_gap:.3e}"
    )
    if not r.certified:
        raise VerdictFailure(text)
    return res, text


def cmd_vi_check(args):
    x, fx = read_vector(args.xstar), read_vector(args.fvalue)
    cone = make_cone(args.cone or "orthant-lp", args.dim or x.size, args.p)
    check_dim(cone, x, fx)
    if isinstance(cone, OrthantCone) and cone.is_sup:
        raise InputError("no single-valued duality map for the sup norm")
    rep = verify_vi(cone, x, fx, args.samples, args.seed)
    res = {"cone": cone.to_json(), **rep.to_json(), "in_cone": leq(cone, np.zeros(cone.dim), x)}
    text = f"min <z - x*, J(x* - f)> = {rep.vi_min_inner:.3e}"
    if not res["in_cone"] or rep.vi_min_inner < -args.tol:
        raise VerdictFailure(text)
    return res, text


def cmd_verify_lemma71(args):
    x = read_vector(args.point)
    rep = verify_lemma_7_1(x, args.p, args.samples, args.seed)
    text = (
        f"<x+, J(x-)> = {rep.support_residual:.3e}, min <z, J(x-)> = {rep.min_inner:.3e}, "
        f"optimality gap {rep.optimality_gap:.3e}"
    )
    if not rep.passed():
        raise VerdictFailure(text)
    return rep.to_json(), text


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the run report as JSON")
    common.add_argument("--out", help="write the run report to this file")
    common.add_argument("--seed", type=int, default=0)

    cone_opts = argparse.ArgumentParser(add_help=False)
    cone_opts.add_argument("--cone", help="descriptor file/JSON or one of " + ", ".join(SHORTHANDS))
    cone_opts.add_argument("--dim", type=int, help="dimension for shorthand cones")
    cone_opts.add_argument("--p", type=float, default=2.0, help="exponent for orthant-lp")

    parser = argparse.ArgumentParser(prog="isocone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("project", parents=[common, cone_opts], help="project a point onto a cone")
    s.add_argument("--point", required=True)
    s.add_argument("--representative", choices=("plus", "smallest", "largest"), default="plus")
    s.add_argument("--samples", type=int, default=1000, help="VI samples (circular cones)")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("membership", parents=[common, cone_opts], help="is z in P(x)?")
    s.add_argument("--point", required=True)
    s.add_argument("--candidate", required=True)
    s.add_argument("--tol", type=float, default=0.0)
    s.set_defaults(func=cmd_membership)

    s = sub.add_parser("counterexample", parents=[common], help="non-isotone circular cone witness")
    s.add_argument("--ratio-only", action="store_true")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("isotone-check", parents=[common, cone_opts], help="sample ordered pairs")
    s.add_argument("--direction", choices=("down", "up"), default="down")
    s.add_argument("--pairs", type=int, default=1000)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--expect", choices=("holds_on_samples", "violated"))
    s.set_defaults(func=cmd_isotone_check)

    s = sub.add_parser("fixpoint", parents=[common], help="fixed points of a finite set-valued map")
    s.add_argument("--poset", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--ystar")
    s.add_argument("--vstar")
    s.set_defaults(func=cmd_fixpoint)

    s = sub.add_parser("fixpoint-corpus", parents=[common], help="random finite instances")
    s.add_argument("--instances", type=int, default=1000)
    s.add_argument("--max-size", type=int, default=6)
    s.set_defaults(func=cmd_fixpoint_corpus)

    s = sub.add_parser("bestapprox", parents=[common], help="best-approximation point of a monotone map")
    s.add_argument("--space", choices=("lp", "sup"), default="lp")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--dim", type=int, help="dimension of the random instance used without --map")
    s.add_argument("--map", help="map spec; omitted means a seeded random affine instance")
    s.add_argument("--ystar", default="auto", help="'auto' or a vector file/JSON")
    s.add_argument("--direction", choices=("down", "up"), default="down")
    s.add_argument("--selection", choices=("smallest", "plus"), default="smallest")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=100_000)
    s.add_argument("--samples", type=int, default=1000, help="VI samples")
    s.set_defaults(func=cmd_bestapprox)

    s = sub.add_parser("vi-check", parents=[common, cone_opts], help="sampled VI certificate")
    s.add_argument("--xstar", required=True)
    s.add_argument("--fvalue", required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_vi_check)

    s = sub.add_parser("verify-lemma71", parents=[common], help="duality certificate for x+ in l_p")
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--point", required=True)
    s.add_argument("--samples", type=int, default=10_000)
    s.set_defaults(func=cmd_verify_lemma71)
    return parser


def _echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "json", "out")}


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, default=lambda o: o.item() if hasattr(o, "item") else str(o))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bestapprox" and args.map is None and args.dim is None:
        args.dim = 5
    start = time.perf_counter()
    code, err = EXIT_OK, None
    try:
        results, text = args.func(args)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        # library precondition errors subclass ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerdictFailure as exc:
        code, err = EXIT_VERDICT, str(exc)
        results, text = {"failure": err}, err
    report = {
        "command": args.command,
        "config_echo": _echo(args),
        "seed": args.seed,
        "results": results,
        "wall_time_ms": int((time.perf_counter() - start) * 1000),
        "version": __version__,
        "ok": code == EXIT_OK,
    }
    if args.out:
        Path(args.out).write_text(_dump(report) + "\n")
    if args.json:
        print(_dump(report))
    elif code == EXIT_OK:
        print(text)
    else:
        print(f"FAIL: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
