"""The fixed example corpus and the invariant checks run over it."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .builders import build, parse
from .exactgeom import GeometryError, Polytope
from .monopath import (
    ch_covers,
    ch_facets,
    ch_faces,
    ch_is_simple,
    ch_verify,
)
from .oriented import (
    MINUS,
    PLUS,
    NotStratified,
    OrientationError,
    OrientedPolytope,
    interval_face,
    is_stratification,
    orient,
    transitive_closure,
)
from .posetalg import (
    PosetAlgebraError,
    char_kernel,
    chow_polynomial,
    is_kernel,
    kls_functions,
    polytope_kernel,
    shape_checks,
    verify_main_theorem,
    vertex_graded_poset,
)

STRATIFIED_QUICK = (
    "simplex(1)",
    "simplex(2)",
    "simplex(3)",
    "simplex(4)",
    "cube(1)",
    "cube(2)",
    "cube(3)",
    "prod(simplex(2),simplex(1))",
    "prod(cube(2),simplex(1))",
    "pyrMin(quadSep)",
    "pyrMax(pyrMin(quadSep))",
    "trapezohedron(3)",
    "trapezohedron(4)",
    "quadSep",
)
OTHER_QUICK = (
    "quadAdj",
    "nostrat5",
    "ngon(3)",
    "ngon(4)",
    "ngon(5)",
    "ngon(6)",
    "ngon(7)",
    "ngon(8)",
)
FULL_EXTRA = (
    "simplex(5)",
    "simplex(6)",
    "cube(4)",
    "prod(simplex(2),simplex(2))",
    "prod(simplex(3),simplex(1))",
    "pyrMin(cube(3))",
    "pyrMax(cube(3))",
    "pyrMin(prod(simplex(2),simplex(1)))",
    "pyrMin(pyrMin(quadSep))",
    "trapezohedron(5)",
    "trapezohedron(6)",
    "prod(trapezohedron(3),simplex(1))",
)

# Built from simple polytopes by products and lower pyramids only.
LOWER_PYRAMID_PRODUCT = (
    "simplex(1)",
    "simplex(2)",
    "simplex(3)",
    "simplex(4)",
    "cube(2)",
    "cube(3)",
    "prod(simplex(2),simplex(1))",
    "prod(cube(2),simplex(1))",
    "pyrMin(cube(2))",
    "pyrMin(cube(3))",
    "pyrMin(prod(simplex(2),simplex(1)))",
    "prod(simplex(2),simplex(2))",
    "pyrMin(pyrMin(cube(2)))",
)


def suite(name: str) -> tuple[str, ...]:
    if name == "quick":
        return STRATIFIED_QUICK + OTHER_QUICK
    if name == "full":
        return STRATIFIED_QUICK + OTHER_QUICK + FULL_EXTRA
    raise ValueError(f"unknown suite {name!r}")


@dataclass
class Member:
    """A corpus entry: built lazily, analysed lazily."""

    name: str
    source: tuple | None = None  # (Polytope, LinForm) for file inputs

    @cached_property
    def geometry(self):
        return self.source if self.source is not None else build(parse(self.name))

    @property
    def polytope(self) -> Polytope:
        return self.geometry[0]

    @cached_property
    def oriented(self) -> OrientedPolytope:
        return orient(*self.geometry)


@dataclass
class CheckResult:
    member: str
    check: str
    ok: bool
    detail: str = ""


@dataclass
class CheckLog:
    results: list = field(default_factory=list)

    def add(self, member, check, ok, detail=""):
        self.results.append(CheckResult(member, check, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def first_failure(self) -> CheckResult | None:
        return next((r for r in self.results if not r.ok), None)


def euler_ok(P: Polytope) -> bool:
    f = P.lattice.f_vector()
    return sum((-1) ** (k + 1) * n for k, n in enumerate(f)) == 0


def intersection_closed(P: Polytope) -> bool:
    L = P.lattice
    return all(L.face(a.vset & b.vset) is not None for a, b in combinations(L.faces, 2))


def check_member(m: Member, log: CheckLog) -> None:
    name = m.name
    P = m.polytope
    log.add(name, "euler relation", euler_ok(P))
    log.add(name, "faces closed under intersection", intersection_closed(P))
    op = m.oriented
    a = op.analysis
    n = op.n
    sm, sp = is_stratification(op, a.bb, MINUS)[0], is_stratification(op, a.bb, PLUS)[0]
    log.add(name, "stratification duality", sm == sp, f"minus={sm} plus={sp}")
    rel = a.rel
    log.add(
        name,
        "relation containments",
        rel.O <= (rel.Bminus & rel.Bplus) and (rel.Bminus | rel.Bplus) <= rel.C,
    )
    log.add(name, "closure of witness relation", transitive_closure(rel.O, n) == rel.C)
    dims = [a.bb.fminus_dim[v] + a.bb.fplus_dim[v] for v in range(n)]
    log.add(name, "dim F- + dim F+ >= dim P", all(d >= op.dim for d in dims))
    if sm:
        log.add(name, "dim F- + dim F+ = dim P", all(d == op.dim for d in dims))
    if a.irreducible:
        log.add(name, "eight conditions agree", a.report.constant, str(a.report.conditions))
    if a.stratified and (op.source, op.sink) in op.directed_edges:
        tri = sum(
            1
            for f in op.lattice.faces_of_dim(2)
            if len(f.vertices) == 3 and {op.source, op.sink} <= f.vset
        )
        log.add(name, "source-sink triangle bound", tri >= op.dim - 1, f"{tri} triangles")
    if not a.stratified or op.dim < 1:
        return
    check_stratified(m, log)


def check_stratified(m: Member, log: CheckLog) -> None:
    name, op = m.name, m.oriented
    a = op.analysis
    ok = True
    for u, w in a.rel.O:
        G = interval_face(op, u, w)
        if a.bb.fminus_dim[u] + G.dim + a.bb.fplus_dim[w] != op.dim:
            ok = False
    log.add(name, "interval dimensions", ok)
    L = ch_faces(op)
    log.add(name, "chain sums bounded by dim P", all(sum(f.dim for f in c.faces) <= op.dim for c in L.chains))
    res = ch_verify(op, L)
    log.add(name, "path polytope oracle", res.isomorphic, f"{res.combinatorial_f} vs {res.geometric_f}")
    ch_facets(op, L)
    log.add(name, "facet classification", True)
    covers_ok = all(
        sorted(c.key for c in ch_covers(op, ch)) == sorted(L.chains[j].key for j in L.up(i))
        for i, ch in enumerate(L.chains)
        if ch.faces
    )
    log.add(name, "covers by merge and enlargement", covers_ok)
    simple = ch_is_simple(op, L)
    log.add(name, "simplicity conditions agree", simple.agree, str(simple.conditions))
    X_ = vertex_graded_poset(op)
    kappa = polytope_kernel(op, X_)
    H = chow_polynomial(kappa)
    mt = verify_main_theorem(op, H)
    log.add(name, "Chow polynomial = dual h-polynomial", mt.ok)
    if simple.simple:
        kc = is_kernel(kappa)
        log.add(name, "kernel axiom", kc.ok, kc.reason)
        kls_functions(kappa)
        log.add(name, "KLS identities", True)
        top = H[(X_.bottom(), X_.top())]
        flags = shape_checks(top, op.dim - 1)
        log.add(name, "H palindromic and unimodal", flags["palindromic"] and flags["unimodal"], str(top))
    if m.name in LOWER_PYRAMID_PRODUCT:
        log.add(name, "kernel equals characteristic kernel", kappa == char_kernel(X_))


def run_suite(members, log: CheckLog | None = None, stop_early: bool = True) -> CheckLog:
    log = log or CheckLog()
    for m in members:
        try:
            check_member(m, log)
        except (AssertionError, GeometryError, OrientationError, PosetAlgebraError, NotStratified) as exc:
            log.add(m.name, "internal consistency", False, f"{type(exc).__name__}: {exc}")
        if stop_early and not log.ok:
            break
    return log
