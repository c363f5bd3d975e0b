"""Command-line front end: one JSON document on stdout per invocation.

Exit codes: 0 success, 1 infeasible or empty result, 2 invalid input or
usage, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import random
import sys
from fractions import Fraction
from typing import List, Optional

from . import io as lio
from .geometry.norms import linf
from .geometry.ops import ResourceCapError
from .geometry.polytope import EMPTY, GeometryError
from .instance import InstanceError
from .lab import (
    ScanCapError,
    counterexample_m1,
    counterexample_m2,
    quasimetric_grid,
    random_polytope,
    random_tree,
    restriction_scan,
)
from .metric import MetricError, build_low_degree_tree, theta, tree_metric
from .nagata import (
    CoverError,
    PatchError,
    WhitneyError,
    greedy_cover,
    nagata_cover_metric_tree,
    patch_selections,
    path_space,
    solver_locals,
    tree_cover_supplier,
    verify_nagata_cover,
    whitney_partition,
)
from .rational import INF, RationalParseError, fmt, parse_rational
from .selectors import (
    parallel_body_centroid,
    rect_selector_linf2,
    regularity_coefficient,
    steiner_point_polygon,
)
from .instance import SetValuedInstance
from .solver import SubsetCapError, feasible_at, gamma_ell, gamma_set, min_lipschitz, orbit

OK, EMPTY_RESULT, BAD_INPUT, CAPPED = 0, 1, 2, 3

COMMANDS = (
    "validate",
    "solve",
    "scan",
    "gamma",
    "orbit",
    "tree",
    "cover",
    "whitney",
    "patch-demo",
    "counterexample",
    "selector",
)


class UsageError(ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", help="input JSON document")
    common.add_argument("--lambda", dest="lam", type=_rational, help="Lipschitz bound p/q")
    common.add_argument("--N", dest="N", type=int, help="restriction size")
    common.add_argument("--ell", type=int, help="depth of the iterated gamma set")
    common.add_argument("--point", help="point label")
    common.add_argument("--subset", help="comma-separated point labels")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, help="work cap (subsets or halfspaces)")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("--scale", type=_rational, help="covering scale (cover)")
    common.add_argument("--nodes", type=int, help="node count for generated trees and paths")
    common.add_argument("--r", dest="r", type=_rational, help="constant lengthscale (whitney, patch-demo)")
    common.add_argument("--A", dest="A", type=int, help="initial large constant (whitney)")
    common.add_argument("--kind", help="counterexample family (m1, m2, quasimetric) or selector method")
    common.add_argument("--n", dest="n", type=int, help="grid size for the quasimetric family")
    p = argparse.ArgumentParser(prog="lipsel", description="Exact Lipschitz selection toolkit")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _read(path: Optional[str]) -> bytes:
    if path is None:
        raise UsageError("an input file is required")
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _instance(args) -> SetValuedInstance:
    return lio.parse_instance(_read(args.file))


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{ {'lam': 'lambda'}.get(n, n) } is required")


def _point(inst, label):
    if label not in inst.space.index:
        raise UsageError(f"unknown point {label!r}")
    return label


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args):
    inst = _instance(args)
    return OK, {
        "valid": True,
        "points": len(inst.points),
        "dimension": inst.dim,
        "m": inst.m,
        "mode": inst.space.mode,
        "norm": inst.norm.kind,
        "canonical": lio.instance_doc(inst),
    }


def cmd_solve(args):
    inst = _instance(args)
    if args.lam is not None:
        sel = feasible_at(inst, args.lam)
        if sel is None:
            return EMPTY_RESULT, {"feasible": False, "lambda": fmt(args.lam)}
        return OK, {
            "feasible": True,
            "lambda": fmt(args.lam),
            "seminorm": fmt(sel.lip),
            "selection": lio.selection_doc(sel.values),
        }
    out = min_lipschitz(inst)
    if out is None:
        return EMPTY_RESULT, {"feasible": False, "lambda_star": None}
    lam, sel = out
    return OK, {
        "feasible": True,
        "lambda_star": fmt(lam),
        "seminorm": fmt(sel.lip),
        "selection": lio.selection_doc(sel.values),
    }


def cmd_scan(args):
    inst = _instance(args)
    _need(args, "N")
    kw = {} if args.cap is None else {"cap": args.cap}
    rep = restriction_scan(inst, args.N, **kw)
    return OK, {
        "N": rep.N,
        "local": fmt(rep.local),
        "global": fmt(rep.global_),
        "ratio": fmt(rep.ratio),
        "witness": [str(x) for x in rep.witness],
        "subsets": rep.subsets,
    }


def _set_result(G, extra):
    doc = dict(extra)
    doc["empty"] = G is EMPTY
    doc["vertices"] = lio.polytope_doc(G)
    if G is not EMPTY:
        doc["affine_dim"] = G.affine_dim
    return (EMPTY_RESULT if G is EMPTY else OK), doc


def cmd_gamma(args):
    inst = _instance(args)
    _need(args, "lam", "point")
    x = _point(inst, args.point)
    base = {"lambda": fmt(args.lam), "point": x}
    if args.subset is not None:
        S = [_point(inst, s) for s in args.subset.split(",") if s]
        return _set_result(gamma_set(inst, args.lam, x, S), dict(base, subset=S))
    if args.ell is None:
        raise UsageError("gamma needs --subset or --ell")
    kw = {} if args.cap is None else {"cap": args.cap}
    return _set_result(gamma_ell(inst, args.lam, x, args.ell, **kw), dict(base, ell=args.ell))


def cmd_orbit(args):
    inst = _instance(args)
    _need(args, "lam", "point")
    x = _point(inst, args.point)
    return _set_result(orbit(inst, args.lam, x), {"lambda": fmt(args.lam), "point": x})


def cmd_tree(args):
    inst = _instance(args)
    sp = inst.space
    if any(v is INF for row in sp.table for v in row):
        raise UsageError("tree construction needs finite distances")
    tree, hub = build_low_degree_tree(sp)
    dT = tree_metric(tree)
    worst = Fraction(1)
    for i, x in enumerate(sp.points):
        for y in sp.points[i + 1:]:
            r = sp.d(x, y)
            if r > 0:
                worst = max(worst, dT.d(x, y) / r)
    return OK, {
        "hub": str(hub),
        "hub_degree": tree.degree(hub),
        "edges": lio.tree_doc(tree),
        "distortion": fmt(worst),
        "theta": theta(len(sp.points)),
    }


def _tree_input(args):
    if args.file is not None:
        doc = lio.load_json(_read(args.file))
        tree = lio.tree_from_doc(doc)
        if tree is None:
            inst = lio.instance_from_doc(doc)
            return None, inst.space
        return tree, tree_metric(tree)
    rng = random.Random(args.seed)
    tree = random_tree(rng, args.nodes or 12, den=2)
    return tree, tree_metric(tree)


def cmd_cover(args):
    tree, space = _tree_input(args)
    s = args.scale if args.scale is not None else Fraction(2)
    if tree is not None:
        cov = nagata_cover_metric_tree(tree, s)
    else:
        cov = greedy_cover(space, s)
    rep = verify_nagata_cover(space, cov, Fraction(1, 16), 1)
    doc = {
        "scale": fmt(s),
        "construction": "tree" if tree is not None else "greedy",
        "parts": [[str(x) for x in part] for part in cov.parts],
        "verified": rep.ok,
        "max_parts_met": rep.max_parts_met,
    }
    if cov.labels is not None:
        doc["labels"] = [[q, str(z)] for q, z in cov.labels]
    if tree is not None:
        doc["edges"] = lio.tree_doc(tree)
    if not rep.ok:
        doc["violation"] = {"kind": rep.violation, "witness": [str(w) for w in rep.witness]}
    return (OK if rep.ok else EMPTY_RESULT), doc


def cmd_whitney(args):
    tree, space = _tree_input(args)
    r = args.r if args.r is not None else Fraction(1)
    kw = {}
    if args.A is not None:
        kw["A"] = args.A
    cover = tree_cover_supplier(tree) if tree is not None else greedy_cover
    W = whitney_partition(space, {x: r for x in space.points}, cover=cover, **kw)
    doc = lio.partition_doc(W)
    doc["sums_to_one"] = all(W.total(x) == 1 for x in space.points)
    if tree is not None:
        doc["edges"] = lio.tree_doc(tree)
    return OK, doc


def cmd_patch_demo(args):
    n = args.nodes or 8
    rng = random.Random(args.seed)
    tree, space = path_space(n)
    space = tree_metric(tree)
    images = {x: random_polytope(rng, 1, 1, box=3) for x in space.points}
    inst = SetValuedInstance(space, linf(1), images, 1)
    r = args.r if args.r is not None else Fraction(2)
    W = whitney_partition(space, {x: r for x in space.points}, cover=tree_cover_supplier(tree))
    locs = solver_locals(inst, W)
    res = patch_selections(W, locs, inst.norm, space)
    return OK, {
        "points": [str(x) for x in space.points],
        "sets": {str(x): lio.polytope_doc(images[x]) for x in space.points},
        "entries": len(W.entries),
        "A": W.A,
        "patched": lio.selection_doc(res.values),
        "seminorm": fmt(res.seminorm),
        "inside": all(images[x].contains(res.values[x]) for x in space.points),
        "constants": {
            "C_ls": fmt(res.C_ls),
            "C_wh": fmt(res.C_wh),
            "C_eta": fmt(res.C_eta),
            "C_agr": fmt(res.C_agr),
            "C_lip": fmt(res.C_lip),
            "D_star": res.D_star,
        },
    }


def cmd_counterexample(args):
    kind = args.kind or "m1"
    if kind == "m1":
        inst = counterexample_m1(args.lam if args.lam is not None else 2)
    elif kind == "m2":
        inst = counterexample_m2(args.lam if args.lam is not None else 2)
    elif kind == "quasimetric":
        inst = quasimetric_grid(args.N or 5, args.n or 10)
    else:
        raise UsageError(f"unknown counterexample family {kind!r}")
    return OK, lio.instance_doc(inst)


def cmd_selector(args):
    doc = lio.load_json(_read(args.file))
    doc = lio._obj(doc, "$")
    d = lio._int(lio._field(doc, "dimension", "$"), "$.dimension")
    P = lio.parse_polytope_doc(lio._field(doc, "vertices", "$"), d, "$.vertices")
    norm = lio.parse_norm(doc["norm"], d) if "norm" in doc else linf(d)
    method = args.kind or "centroid"
    if method == "centroid":
        rep = parallel_body_centroid(P, norm)
        return OK, {"method": rep.method, "point": lio.vector(rep.point), "inside": rep.inside}
    if method == "rect":
        p = rect_selector_linf2(P)
        return OK, {"method": "rect_linf2", "point": lio.vector(p), "inside": P.contains(p)}
    if method == "steiner":
        p = steiner_point_polygon(P)
        # binary64 output; exposed as repr strings to stay lossless
        return OK, {"method": "steiner_quadrature", "point": [repr(c) for c in p], "inside": None}
    if method == "regularity":
        delta = regularity_coefficient(P, norm)
        return OK, {"method": "regularity", "value": None if delta is None else fmt(delta)}
    raise UsageError(f"unknown selector {method!r}")


HANDLERS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "scan": cmd_scan,
    "gamma": cmd_gamma,
    "orbit": cmd_orbit,
    "tree": cmd_tree,
    "cover": cmd_cover,
    "whitney": cmd_whitney,
    "patch-demo": cmd_patch_demo,
    "counterexample": cmd_counterexample,
    "selector": cmd_selector,
}


def _error(category: str, exc: Exception, **extra) -> dict:
    doc = {"error": category, "message": str(exc)}
    doc.update(extra)
    return doc


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = _parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        code, doc = HANDLERS[args.command](args)
    except UsageError as exc:
        parser.print_usage(err)
        print(f"lipsel: {exc}", file=err)
        return BAD_INPUT
    except lio.SchemaError as exc:
        code, doc = BAD_INPUT, _error("schema", exc, path=exc.path)
    except MetricError as exc:
        code, doc = BAD_INPUT, _error("metric", exc, kind=exc.kind, witness=[str(w) for w in exc.witness])
    except (InstanceError, GeometryError, CoverError, RationalParseError) as exc:
        if isinstance(exc, ResourceCapError):
            code, doc = CAPPED, _error("cap", exc)
        else:
            code, doc = BAD_INPUT, _error("input", exc)
    except (ScanCapError, SubsetCapError) as exc:
        code, doc = CAPPED, _error("cap", exc, required=exc.required, cap=exc.cap)
    except (WhitneyError, PatchError) as exc:
        code, doc = EMPTY_RESULT, _error("construction", exc)
    if code == BAD_INPUT:
        print(f"lipsel: {doc.get('message')}", file=err)
    out.write(lio.dumps(doc))
    return code


def main() -> None:
    sys.exit(run())
