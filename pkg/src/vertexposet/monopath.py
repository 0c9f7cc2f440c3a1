"""Monotone path polytopes: the combinatorial face lattice built from
monotone chains of faces, simplicity tests, and the Minkowski slice model
used as an independent geometric oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .exactgeom import (
    Face,
    Polytope,
    lattice_isomorphic,
    minkowski_sum,
    polytope_from_vertices,
    slice_at_level,
)
from .oriented import MINUS, PLUS, OrientedPolytope, face_of, require_stratified


class JoinDimensionMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class MonotoneChain:
    faces: tuple  # of Face, each of positive dimension; () is the empty face of CH

    @property
    def dim(self) -> int:
        if not self.faces:
            return -1
        return sum(f.dim for f in self.faces) - len(self.faces)

    @property
    def key(self):
        return tuple(f.vertices for f in self.faces)

    def __len__(self):
        return len(self.faces)

    def __le__(self, other: MonotoneChain) -> bool:
        """Containment of the corresponding faces of the path polytope."""
        return all(any(g.vset <= f.vset for f in other.faces) for g in self.faces)

    def to_json(self):
        return [list(f.vertices) for f in self.faces]


@dataclass
class CHLattice:
    """Faces of CH(P), the empty face first, sorted by (dim, key)."""

    chains: list
    covers: list = field(default_factory=list)  # (lower index, upper index)

    def __post_init__(self):
        self.index = {c.key: i for i, c in enumerate(self.chains)}

    def __len__(self):
        return len(self.chains)

    @property
    def dims(self) -> list[int]:
        return [c.dim for c in self.chains]

    @property
    def dim(self) -> int:
        return max(self.dims)

    def f_vector(self) -> tuple:
        d = self.dim
        return tuple(sum(1 for c in self.chains if c.dim == k) for k in range(-1, d + 1))

    def of_dim(self, k: int) -> list[MonotoneChain]:
        return [c for c in self.chains if c.dim == k]

    def hasse(self):
        return self.dims, self.covers

    def up(self, i: int) -> list[int]:
        return [b for a, b in self.covers if a == i]

    def to_json(self) -> dict:
        return {
            "faces": [c.to_json() for c in self.chains],
            "dims": self.dims,
            "covers": [list(c) for c in self.covers],
            "f_vector": list(self.f_vector()),
        }


# ---------------------------------------------------------------- enumeration


def _hops(op: OrientedPolytope) -> dict:
    """vertex v -> positive-dimensional faces whose minimum is v."""
    hops: dict = {}
    for i, f in enumerate(op.lattice.faces):
        if f.dim >= 1:
            hops.setdefault(op.face_min[i], []).append(f)
    return hops


def _chains_from(op: OrientedPolytope, hops: dict, memo: dict, v: int) -> list[tuple]:
    if v in memo:
        return memo[v]
    out = []
    for f in hops.get(v, ()):
        w = op.fmax(f)
        if w == op.sink:
            out.append((f,))
        else:
            out.extend((f,) + rest for rest in _chains_from(op, hops, memo, w))
    memo[v] = out
    return out


def monotone_chains(op: OrientedPolytope) -> list[MonotoneChain]:
    """All monotone chains of faces, by depth-first search over face hops."""
    raw = _chains_from(op, _hops(op), {}, op.source)
    chains = [MonotoneChain(c) for c in raw]
    return sorted(chains, key=lambda c: (c.dim, c.key))


def ch_faces(op: OrientedPolytope) -> CHLattice:
    require_stratified(op)
    if op.dim < 1:
        raise ValueError("the path polytope needs dim P >= 1")
    chains = [MonotoneChain(())] + monotone_chains(op)
    by_dim: dict = {}
    for i, c in enumerate(chains):
        by_dim.setdefault(c.dim, []).append(i)
    covers = []
    for i, c in enumerate(chains):
        for j in by_dim.get(c.dim + 1, ()):
            if c <= chains[j]:
                covers.append((i, j))
    return CHLattice(chains, covers)


def ch_vertices(op: OrientedPolytope) -> list[tuple]:
    """Monotone edge paths from source to sink, as vertex sequences."""
    require_stratified(op)
    succ: dict = {}
    for a, b in op.directed_edges:
        succ.setdefault(a, []).append(b)
    paths = []

    def walk(path):
        v = path[-1]
        if v == op.sink:
            paths.append(tuple(path))
            return
        for w in succ.get(v, ()):
            walk(path + [w])

    walk([op.source])
    return sorted(paths)


# ---------------------------------------------------------------- facets, covers


@dataclass(frozen=True)
class FacetClassification:
    type1: tuple  # single-term chains (F,) with F a facet of P through source and sink
    type2: tuple  # two-term chains (F-(v), F+(v)), v not extreme


def ch_facets(op: OrientedPolytope, lattice: CHLattice | None = None) -> FacetClassification:
    analysis = require_stratified(op)
    L = op.lattice
    ends = {op.source, op.sink}
    type1 = tuple(
        MonotoneChain((f,)) for f in L.facets() if ends <= f.vset and f.dim >= 1
    )
    type2 = tuple(
        MonotoneChain((face_of(analysis.bb, MINUS, v), face_of(analysis.bb, PLUS, v)))
        for v in range(op.n)
        if v not in ends
    )
    if op.dim >= 2:
        lattice = lattice or ch_faces(op)
        maximal = {c.key for c in lattice.of_dim(lattice.dim - 1)}
        found = {c.key for c in type1 + type2}
        assert found == maximal, "facet classification disagrees with the chain lattice"
    return FacetClassification(type1, type2)


def join_faces(op: OrientedPolytope, F1: Face, F2: Face) -> Face:
    """The face spanned by F1 and F2, where max F1 = min F2."""
    if op.fmax(F1) != op.fmin(F2):
        raise ValueError("the maximum of F1 must be the minimum of F2")
    F = op.lattice.smallest_face_containing(F1.vset | F2.vset)
    if F.dim != F1.dim + F2.dim or op.fmin(F) != op.fmin(F1) or op.fmax(F) != op.fmax(F2):
        raise JoinDimensionMismatch(f"join of {F1.vertices} and {F2.vertices} is {F.vertices}")
    return F


def ch_covers(op: OrientedPolytope, chain: MonotoneChain) -> list[MonotoneChain]:
    """Faces of CH(P) having ``chain`` as a facet, from merges and enlargements."""
    require_stratified(op)
    L = op.lattice
    fs = chain.faces
    out = []
    for i in range(len(fs) - 1):
        out.append(MonotoneChain(fs[:i] + (join_faces(op, fs[i], fs[i + 1]),) + fs[i + 2:]))
    for i, f in enumerate(fs):
        for j in L.up[L.index[f.vertices]]:
            g = L.faces[j]
            if op.fmin(g) == op.fmin(f) and op.fmax(g) == op.fmax(f):
                out.append(MonotoneChain(fs[:i] + (g,) + fs[i + 1:]))
    return sorted(out, key=lambda c: (c.dim, c.key))


# ---------------------------------------------------------------- simplicity


@dataclass(frozen=True)
class SimplicityReport:
    conditions: tuple  # verdicts for the four equivalent conditions
    triangle_counts: dict  # directed edge -> (triangles found, required)
    vertex_degrees: dict  # path -> number of incident edges of CH

    @property
    def simple(self) -> bool:
        return self.conditions[0]

    @property
    def agree(self) -> bool:
        return len(set(self.conditions)) == 1


def _star_is_simple(op: OrientedPolytope, F: Face, G: Face) -> bool:
    """Is G simple along its face F: exactly dim G - dim F faces of G cover F?"""
    L = op.lattice
    ups = [j for j in L.up[L.index[F.vertices]] if L.faces[j].vset <= G.vset]
    return len(ups) == G.dim - F.dim


def ch_is_simple(op: OrientedPolytope, lattice: CHLattice | None = None) -> SimplicityReport:
    analysis = require_stratified(op)
    bb = analysis.bb
    L = op.lattice
    lattice = lattice or ch_faces(op)

    degrees = {}
    for i, c in enumerate(lattice.chains):
        if c.dim == 0:
            path = (op.fmin(c.faces[0]),) + tuple(op.fmax(f) for f in c.faces)
            degrees[path] = len(lattice.up(i))
    c1 = all(d == op.dim - 1 for d in degrees.values())

    edge_set = set(op.directed_edges)
    counts = {}
    c2 = c3 = True
    for v, w in op.directed_edges:
        G = L.face(face_of(bb, PLUS, v).vset & face_of(bb, MINUS, w).vset)
        tri = 0
        for f in L.faces_of_dim(2):
            if len(f.vertices) == 3 and {v, w} <= f.vset:
                (x,) = f.vset - {v, w}
                if (v, x) in edge_set and (x, w) in edge_set:
                    tri += 1
        counts[(v, w)] = (tri, G.dim - 1)
        c2 = c2 and tri == G.dim - 1
        c3 = c3 and _star_is_simple(op, L.face((v, w)), G)

    c4 = True
    for i, f in enumerate(L.faces):
        if f.dim >= 1:
            v, w = op.face_min[i], op.face_max[i]
            G = L.face(face_of(bb, PLUS, v).vset & face_of(bb, MINUS, w).vset)
            if not _star_is_simple(op, f, G):
                c4 = False
                break
    report = SimplicityReport((c1, c2, c3, c4), counts, degrees)
    assert report.agree, f"simplicity conditions disagree: {report.conditions}"
    return report


# ---------------------------------------------------------------- geometric model


def slice_levels(op: OrientedPolytope) -> list[Fraction]:
    vals = sorted(set(op.values))
    return [(a + b) / 2 for a, b in zip(vals, vals[1:])]


def ch_geometric(op: OrientedPolytope) -> Polytope:
    """Minkowski sum of the slices at midpoints between consecutive values.

    Works for any oriented polytope; a point yields a point.
    """
    if op.dim < 1:
        return polytope_from_vertices([tuple(Fraction(0) for _ in range(op.base.ambient_dim))])
    slices = [slice_at_level(op.base, op.ell, c) for c in slice_levels(op)]
    return minkowski_sum(slices)


@dataclass(frozen=True)
class VerifyResult:
    isomorphic: bool
    combinatorial_f: tuple
    geometric_f: tuple
    mapping: dict | None = None


def ch_verify(op: OrientedPolytope, lattice: CHLattice | None = None) -> VerifyResult:
    """Compare the chain lattice with the face lattice of the slice model."""
    lattice = lattice or ch_faces(op)
    geo = ch_geometric(op)
    ok, mapping = lattice_isomorphic(lattice, geo.lattice)
    return VerifyResult(ok, lattice.f_vector(), geo.lattice.f_vector(), mapping)


def to_dot(lattice: CHLattice) -> str:
    """The 1-skeleton of CH(P): vertices are paths, edges join paths."""
    lines = ["graph ch_skeleton {"]
    names = {}
    for i, c in enumerate(lattice.chains):
        if c.dim == 0:
            names[i] = "p" + str(len(names))
            label = "-".join(str(f.vertices) for f in c.faces)
            lines.append(f'  {names[i]} [label="{label}"];')
    for i, c in enumerate(lattice.chains):
        if c.dim == 1:
            ends = [a for a, b in lattice.covers if b == i]
            lines.append(f"  {names[ends[0]]} -- {names[ends[1]]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class ChowReport:
    """Everything ``chow`` prints for one oriented polytope."""

    op: OrientedPolytope
    oracle: bool = False

    @cached_property
    def lattice(self) -> CHLattice:
        return ch_faces(self.op)

    def to_json(self) -> dict:
        facets = ch_facets(self.op, self.lattice)
        simple = ch_is_simple(self.op, self.lattice)
        doc = {
            "f_vector": list(self.lattice.f_vector()),
            "dim": self.lattice.dim,
            "vertices": len(ch_vertices(self.op)),
            "facets": {
                "type1": [c.to_json() for c in facets.type1],
                "type2": [c.to_json() for c in facets.type2],
            },
            "simple": simple.simple,
            "simple_conditions": list(simple.conditions),
            "triangle_counts": {
                f"{v}->{w}": {"triangles": t, "required": r}
                for (v, w), (t, r) in sorted(simple.triangle_counts.items())
            },
        }
        if self.oracle:
            res = ch_verify(self.op, self.lattice)
            doc["oracle"] = {
                "isomorphic": res.isomorphic,
                "geometric_f_vector": list(res.geometric_f),
            }
        return doc
