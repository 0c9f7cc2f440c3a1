"""Directed 1-skeleton, Bialynicki-Birula partitions and vertex relations.

The cells O-(v), O+(v) are never materialized as point sets. Each is the set
of (nonempty) faces whose relative interiors make it up: the faces on which
the functional attains its maximum, resp. minimum, at v. Its closure F-(v),
F+(v) is then the set of all faces contained in one of those faces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

from .exactgeom import Face, LinForm, Polytope

MINUS, PLUS = "minus", "plus"


class OrientationError(Exception):
    pass


class EllConstantOnEdge(OrientationError):
    def __init__(self, edge):
        super().__init__(f"functional is constant on edge {edge}")
        self.edge = edge


class NonSimpleExtremum(OrientationError):
    pass


class NotStratified(Exception):
    """Raised when an operation needs Assumption S and it does not hold."""


@dataclass(frozen=True)
class OrientedPolytope:
    base: Polytope
    ell: LinForm
    values: tuple
    directed_edges: tuple
    source: int
    sink: int
    face_min: tuple  # per lattice index; None for the empty face
    face_max: tuple

    @property
    def lattice(self):
        return self.base.lattice

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def n(self) -> int:
        return len(self.base.vertices)

    def fmin(self, face: Face) -> int:
        return self.face_min[self.lattice.index[face.vertices]]

    def fmax(self, face: Face) -> int:
        return self.face_max[self.lattice.index[face.vertices]]

    @cached_property
    def analysis(self) -> Analysis:
        return analyze(self)


def orient(P: Polytope, ell: LinForm) -> OrientedPolytope:
    vals = tuple(ell(v) for v in P.vertices)
    directed = []
    for e in P.edges():
        a, b = e.vertices
        if vals[a] == vals[b]:
            raise EllConstantOnEdge((a, b))
        directed.append((a, b) if vals[a] < vals[b] else (b, a))
    fmin, fmax = [], []
    for f in P.lattice:
        if not f.vertices:
            fmin.append(None)
            fmax.append(None)
            continue
        lo = min(vals[v] for v in f.vertices)
        hi = max(vals[v] for v in f.vertices)
        los = [v for v in f.vertices if vals[v] == lo]
        his = [v for v in f.vertices if vals[v] == hi]
        if len(los) != 1 or len(his) != 1:
            raise NonSimpleExtremum(f"extremum of the functional on face {f.vertices} is not a vertex")
        fmin.append(los[0])
        fmax.append(his[0])
    top = len(P.lattice) - 1
    return OrientedPolytope(
        P, ell, vals, tuple(sorted(directed)), fmin[top], fmax[top], tuple(fmin), tuple(fmax)
    )


@dataclass(frozen=True)
class BBData:
    """Per-vertex face sets of the cells and their closures (lattice indices)."""

    lattice: object
    fminus: tuple  # faces with max at v  (cell O-(v))
    fplus: tuple  # faces with min at v   (cell O+(v))
    fminus_closed: tuple  # faces contained in F-(v)
    fplus_closed: tuple
    fminus_dim: tuple
    fplus_dim: tuple

    def faces(self, side: str) -> tuple:
        return self.fminus if side == MINUS else self.fplus

    def closed(self, side: str) -> tuple:
        return self.fminus_closed if side == MINUS else self.fplus_closed

    def union_vertices(self, side: str, v: int) -> frozenset:
        L = self.lattice
        return frozenset().union(*(L.faces[i].vset for i in self.faces(side)[v]))

    def irreducible_face(self, side: str, v: int) -> Face | None:
        """The single face equal to F-(v) (or F+(v)), if the union is one face."""
        L = self.lattice
        members = self.faces(side)[v]
        big = max(members, key=lambda i: len(L.faces[i].vertices))
        if all(L.faces[i].vset <= L.faces[big].vset for i in members):
            return L.faces[big]
        return None


def _closure(L, members) -> frozenset:
    sets = [L.faces[i].vset for i in members]
    return frozenset(
        j for j, g in enumerate(L.faces) if g.vertices and any(g.vset <= s for s in sets)
    )


def bb_data(op: OrientedPolytope) -> BBData:
    L = op.lattice
    fminus = [[] for _ in range(op.n)]
    fplus = [[] for _ in range(op.n)]
    for i, f in enumerate(L.faces):
        if f.vertices:
            fminus[op.face_max[i]].append(i)
            fplus[op.face_min[i]].append(i)
    fminus = tuple(frozenset(x) for x in fminus)
    fplus = tuple(frozenset(x) for x in fplus)
    return BBData(
        L,
        fminus,
        fplus,
        tuple(_closure(L, m) for m in fminus),
        tuple(_closure(L, m) for m in fplus),
        tuple(max(L.faces[i].dim for i in m) for m in fminus),
        tuple(max(L.faces[i].dim for i in m) for m in fplus),
    )


@dataclass(frozen=True)
class VertexRelations:
    O: frozenset
    Bminus: frozenset
    Bplus: frozenset
    C: frozenset
    witnesses: dict  # (v, w) -> lattice index of a witnessing face

    def matrix(self, name: str, n: int) -> list[str]:
        rel = getattr(self, name)
        return ["".join("1" if (v, w) in rel else "0" for w in range(n)) for v in range(n)]


def transitive_closure(pairs, n: int) -> frozenset:
    """Reflexive-transitive closure of a relation on range(n)."""
    reach = [{v} for v in range(n)]
    for a, b in pairs:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for v in range(n):
            new = set().union(*(reach[w] for w in reach[v]))
            if new != reach[v]:
                reach[v] = new
                changed = True
    return frozenset((v, w) for v in range(n) for w in reach[v])


def relations(op: OrientedPolytope, bb: BBData) -> VertexRelations:
    L = op.lattice
    witnesses = {}
    for i, f in enumerate(L.faces):
        if f.vertices:
            witnesses.setdefault((op.face_min[i], op.face_max[i]), i)
    n = op.n
    minus_u = [bb.union_vertices(MINUS, w) for w in range(n)]
    plus_u = [bb.union_vertices(PLUS, v) for v in range(n)]
    Bm = frozenset((v, w) for v, w in product(range(n), repeat=2) if v in minus_u[w])
    Bp = frozenset((v, w) for v, w in product(range(n), repeat=2) if w in plus_u[v])
    C = transitive_closure(op.directed_edges, n)
    return VertexRelations(frozenset(witnesses), Bm, Bp, C, witnesses)


def is_stratification(op: OrientedPolytope, bb: BBData, side: str = MINUS):
    """Check S_v meets closure(S_w) => S_v inside closure(S_w) face by face.

    Returns ``(True, None)`` or ``(False, (v, w, face))`` where ``face`` is a
    face of the cell at v lying outside the closure of the cell at w.
    """
    cells, closed = bb.faces(side), bb.closed(side)
    for v in range(op.n):
        for w in range(op.n):
            if v == w:
                continue
            inside = cells[v] & closed[w]
            if inside and inside != cells[v]:
                bad = min(cells[v] - closed[w])
                return False, (v, w, op.lattice.faces[bad])
    return True, None


def assumption_i(bb: BBData):
    """Irreducibility: every F-(v) and F+(v) is a single face.

    Returns ``(True, None)`` or ``(False, (side, v))``.
    """
    for side in (MINUS, PLUS):
        for v in range(len(bb.fminus)):
            if bb.irreducible_face(side, v) is None:
                return False, (side, v)
    return True, None


def _is_partial_order(rel: frozenset, n: int) -> bool:
    if any((v, v) not in rel for v in range(n)):
        return False
    if any(v != w and (w, v) in rel for v, w in rel):
        return False
    succ = [set() for _ in range(n)]
    for v, w in rel:
        succ[v].add(w)
    return all(x in succ[v] for v in range(n) for w in succ[v] for x in succ[w])


def covers_of(rel: frozenset, n: int) -> list[tuple[int, int]]:
    out = []
    for v, w in sorted(rel):
        if v == w:
            continue
        if not any(u not in (v, w) and (v, u) in rel and (u, w) in rel for u in range(n)):
            out.append((v, w))
    return out


@dataclass(frozen=True)
class EquivalenceReport:
    conditions: tuple  # conditions (1)..(8)
    violations: dict

    @property
    def all_true(self) -> bool:
        return all(self.conditions)

    @property
    def constant(self) -> bool:
        return len(set(self.conditions)) == 1


def equivalence_report(op: OrientedPolytope, bb: BBData, rel: VertexRelations) -> EquivalenceReport:
    n = op.n
    violations = {}
    c1, violations[1] = is_stratification(op, bb, MINUS)
    c2, violations[2] = is_stratification(op, bb, PLUS)

    c3 = c4 = True
    for v in range(n):
        um, up = bb.union_vertices(MINUS, v), bb.union_vertices(PLUS, v)
        for a, b in op.directed_edges:
            if c3 and b in um and a not in um:
                c3, violations[3] = False, (v, (a, b))
            if c4 and a in up and b not in up:
                c4, violations[4] = False, (v, (a, b))

    c5 = rel.O == rel.C
    c6 = _is_partial_order(rel.O, n)
    c7 = c6 and all(
        bb.fminus_dim[w] == bb.fminus_dim[v] + 1 for v, w in covers_of(rel.O, n)
    )

    L = op.lattice
    by_ends: dict = {}
    for i, f in enumerate(L.faces):
        if f.vertices:
            by_ends.setdefault((op.face_min[i], op.face_max[i]), []).append(i)
    c8 = True
    for v in range(n):
        for w in range(n):
            lhs = _closure(L, by_ends.get((v, w), ()))
            rhs = bb.fplus_closed[v] & bb.fminus_closed[w]
            if lhs != rhs:
                c8, violations[8] = False, (v, w)
                break
        if not c8:
            break
    conds = (c1, c2, c3, c4, c5, c6, c7, c8)
    return EquivalenceReport(conds, {k: x for k, x in violations.items() if x is not None})


def induced_on_face(op: OrientedPolytope, G: Face) -> OrientedPolytope:
    """Restriction of the functional to the face G.

    Local vertex i of the result is vertex ``G.vertices[i]`` of ``op``.
    """
    if not G.vertices:
        raise ValueError("cannot restrict to the empty face")
    return orient(op.base.face_polytope(G), op.ell)


@dataclass(frozen=True)
class VertexPoset:
    elements: tuple
    leq: frozenset
    rank: dict
    covers: tuple

    def le(self, v, w) -> bool:
        return (v, w) in self.leq


@dataclass(frozen=True)
class Analysis:
    bb: BBData
    rel: VertexRelations
    irreducible: bool
    irreducible_violation: object
    report: EquivalenceReport

    @property
    def stratified(self) -> bool:
        """Assumption S: irreducibility plus the eight equivalent conditions."""
        return self.irreducible and self.report.all_true


def analyze(op: OrientedPolytope) -> Analysis:
    bb = bb_data(op)
    rel = relations(op, bb)
    ok, bad = assumption_i(bb)
    return Analysis(bb, rel, ok, bad, equivalence_report(op, bb, rel))


def require_stratified(op: OrientedPolytope) -> Analysis:
    a = op.analysis
    if not a.stratified:
        raise NotStratified(
            f"Assumption S fails: irreducible={a.irreducible}, conditions={a.report.conditions}"
        )
    return a


def vertex_poset(op: OrientedPolytope, bb: BBData, rel: VertexRelations, report=None) -> VertexPoset:
    report = report or equivalence_report(op, bb, rel)
    if not (assumption_i(bb)[0] and report.all_true):
        raise NotStratified("the witness relation is not a graded vertex poset")
    n = op.n
    return VertexPoset(
        tuple(range(n)),
        rel.O,
        {v: bb.fminus_dim[v] for v in range(n)},
        tuple(covers_of(rel.O, n)),
    )


def face_of(bb: BBData, side: str, v: int) -> Face:
    """F-(v) or F+(v) as a face; only meaningful under irreducibility."""
    f = bb.irreducible_face(side, v)
    if f is None:
        raise NotStratified(f"F{'-' if side == MINUS else '+'}({v}) is reducible")
    return f


def interval_face(op: OrientedPolytope, v: int, w: int) -> Face:
    """The face F+(v) /\\ F-(w) (under Assumption I)."""
    bb = op.analysis.bb
    g = face_of(bb, PLUS, v).vset & face_of(bb, MINUS, w).vset
    face = op.lattice.face(g)
    assert face is not None
    return face


def to_dot_skeleton(op: OrientedPolytope) -> str:
    lines = ["digraph skeleton {"]
    for v in range(op.n):
        lines.append(f'  {v} [label="{v} ({op.values[v]})"];')
    for a, b in op.directed_edges:
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot_hasse(op: OrientedPolytope) -> str:
    rel = op.analysis.rel
    lines = ["digraph hasse {", "  rankdir=BT;"]
    for v in range(op.n):
        lines.append(f"  {v};")
    for a, b in covers_of(rel.O, op.n):
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def report_json(op: OrientedPolytope) -> dict:
    a = op.analysis
    L = op.lattice
    n = op.n

    def faces(ix):
        return [list(L.faces[i].vertices) for i in sorted(ix, key=lambda i: L.faces[i].key)]

    return {
        "values": [str(x) for x in op.values],
        "directed_edges": [list(e) for e in op.directed_edges],
        "source": op.source,
        "sink": op.sink,
        "vertices": [
            {
                "Fminus": faces(a.bb.fminus[v]),
                "Fplus": faces(a.bb.fplus[v]),
                "Fminus_dim": a.bb.fminus_dim[v],
                "Fplus_dim": a.bb.fplus_dim[v],
            }
            for v in range(n)
        ],
        "relations": {name: a.rel.matrix(name, n) for name in ("O", "Bminus", "Bplus", "C")},
        "assumption_I": a.irreducible,
        "assumption_I_violation": list(a.irreducible_violation) if a.irreducible_violation else None,
        "conditions": list(a.report.conditions),
        "violations": {str(k): _jsonable(x) for k, x in a.report.violations.items()},
        "stratified": a.stratified,
    }


def _jsonable(x):
    if isinstance(x, Face):
        return list(x.vertices)
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, Fraction):
        return str(x)
    return x
