"""Command-line front end.

Reports go to stdout as JSON, diagnostics to stderr.  Exit status is 0 on
success, 1 when a check fails (or the input is not stratified), 2 on bad
usage or unreadable input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import builders
from .corpus import CheckLog, Member, run_suite, suite
from .exactgeom import GeometryError
from .monopath import ChowReport, to_dot
from .oriented import (
    NotStratified,
    OrientationError,
    orient,
    report_json,
    require_stratified,
    to_dot_hasse,
    to_dot_skeleton,
)
from .posetalg import (
    char_kernel,
    chow_polynomial,
    in_i_rho,
    is_kernel,
    kls_functions,
    polytope_kernel,
    reduced_kernel,
    shape_checks,
    verify_main_theorem,
    vertex_graded_poset,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_MAX_VERTICES = 32


class InputError(Exception):
    pass


def _max_vertices() -> int:
    raw = os.environ.get("MONOPATH_MAX_VERTICES", str(DEFAULT_MAX_VERTICES))
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"MONOPATH_MAX_VERTICES must be an integer, got {raw!r}")


def _check_size(doc_vertices: int) -> None:
    limit = _max_vertices()
    if doc_vertices > limit:
        raise InputError(f"{doc_vertices} vertices exceeds MONOPATH_MAX_VERTICES={limit}")


def load_oriented(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})")
    if not isinstance(doc, dict) or not isinstance(doc.get("vertices"), list):
        raise InputError(f"{path}: expected an object with a 'vertices' list")
    _check_size(len(doc["vertices"]))
    try:
        P, ell = builders.from_json(doc)
        return orient(P, ell)
    except (builders.BuildError, GeometryError, OrientationError) as exc:
        raise InputError(f"{path}: {exc}")


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    try:
        expr = builders.parse(args.expr)
        P, ell = builders.build(expr)
    except builders.BuildError as exc:
        raise InputError(str(exc))
    _check_size(len(P.vertices))
    text = builders.dumps(P, ell, str(expr))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}: {len(P.vertices)} vertices, dim {P.dim}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    op = load_oriented(args.path)
    if args.dot == "skeleton":
        sys.stdout.write(to_dot_skeleton(op))
    elif args.dot == "hasse":
        sys.stdout.write(to_dot_hasse(op))
    else:
        _emit(report_json(op))
    return EXIT_OK


def cmd_chow(args) -> int:
    op = load_oriented(args.path)
    require_stratified(op)
    rep = ChowReport(op, oracle=args.oracle)
    if args.dot:
        sys.stdout.write(to_dot(rep.lattice))
        return EXIT_OK
    doc = rep.to_json()
    if not args.simple:
        doc.pop("triangle_counts")
    _emit(doc)
    if args.oracle and not doc["oracle"]["isomorphic"]:
        print("oracle disagrees with the chain lattice", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_poly(args) -> int:
    op = load_oriented(args.path)
    require_stratified(op)
    X_ = vertex_graded_poset(op)
    chi = char_kernel(X_)
    kappa = polytope_kernel(op, X_) if args.kernel == "paper" else chi
    kcheck = is_kernel(kappa)
    kbar = reduced_kernel(kappa)
    H = chow_polynomial(kappa)
    f = g = None
    if kcheck.ok:
        f, g = kls_functions(kappa)
    intervals = {}
    for s, t in X_.intervals():
        rho = X_.rho(s, t)
        entry = {
            "rank": rho,
            "kappa": kappa[(s, t)].to_list(),
            "kappaBar": kbar[(s, t)].to_list(),
            "chi": chi[(s, t)].to_list(),
            "H": H[(s, t)].to_list(),
            "f": f[(s, t)].to_list() if f else None,
            "g": g[(s, t)].to_list() if g else None,
        }
        if s != t:
            entry["flags"] = shape_checks(H[(s, t)], rho - 1)
        intervals[f"{s},{t}"] = entry
    doc = {
        "kernel": args.kernel,
        "is_kernel": kcheck.ok,
        "label": "kernel" if kcheck.ok else "not a kernel: Chow polynomials may fail to be palindromic",
        "in_I_rho": in_i_rho(kappa) is None,
        "bottom": X_.bottom(),
        "top": X_.top(),
        "intervals": intervals,
    }
    status = EXIT_OK
    if args.verify_main:
        rep = verify_main_theorem(op, H)
        doc["main_theorem"] = {"ok": rep.ok, "intervals": rep.to_json()}
        if not rep.ok:
            status = EXIT_FAIL
    _emit(doc)
    return status


def cmd_verify(args) -> int:
    members = [Member(name) for name in suite(args.suite)]
    for path in args.extra or ():
        op = load_oriented(path)  # validates; reported as exit 2 on failure
        members.append(Member(path, (op.base, op.ell)))
    log = run_suite(members, CheckLog(), stop_early=False)
    width = max((len(r.member) for r in log.results), default=10)
    for r in log.results:
        mark = "PASS" if r.ok else "FAIL"
        print(f"{mark}  {r.member:<{width}}  {r.check}", file=sys.stderr)
    failed = [r for r in log.results if not r.ok]
    doc = {
        "suite": args.suite,
        "members": len(members),
        "checks": len(log.results),
        "failed": len(failed),
        "ok": log.ok,
    }
    if failed:
        r = failed[0]
        doc["first_failure"] = {"member": r.member, "check": r.check, "detail": r.detail}
    _emit(doc)
    return EXIT_OK if log.ok else EXIT_FAIL


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vertexposet",
        description="Vertex posets of oriented polytopes, monotone path polytopes and Chow polynomials.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="build a polytope from a constructor expression")
    p.add_argument("expr", help='e.g. "prod(cube(2),simplex(1))"')
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="orientation, cells, relations and the stratification test")
    p.add_argument("path")
    p.add_argument("--dot", choices=("skeleton", "hasse"), help="emit a Graphviz graph instead")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("chow", help="face lattice of the monotone path polytope")
    p.add_argument("path")
    p.add_argument("--oracle", action="store_true", help="compare with the Minkowski slice model")
    p.add_argument("--simple", action="store_true", help="include per-edge triangle counts")
    p.add_argument("--dot", action="store_true", help="emit the 1-skeleton as Graphviz")
    p.set_defaults(func=cmd_chow)

    p = sub.add_parser("poly", help="kernels, KLS functions and Chow polynomials")
    p.add_argument("path")
    p.add_argument("--kernel", choices=("paper", "chi"), default="paper")
    p.add_argument("--verify-main", action="store_true", help="compare with dual h-polynomials")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("verify", help="run the invariant suite over the fixed corpus")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--extra", nargs="*", metavar="FILE", help="additional polytope JSON files")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotStratified as exc:
        print(f"not stratified: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
