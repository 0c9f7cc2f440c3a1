"""Exact rational polytope engine.

Every coordinate is a :class:`fractions.Fraction`; nothing is ever rounded.
Faces are identified by the sorted tuple of indices of the polytope vertices
they contain, so face identity never depends on a coordinate chart.

Facets are found with an integer double-description pass over the
homogenized point cone, lower faces by closing the facets under
intersection.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import vf2pp_isomorphism

Rat = Fraction
Point = tuple  # tuple[Fraction, ...]


class GeometryError(Exception):
    """Base class for errors raised by the polytope engine."""


class NotAVertex(GeometryError):
    def __init__(self, index: int):
        super().__init__(f"input point {index} is not a vertex of the hull")
        self.index = index


class DegenerateInput(GeometryError):
    pass


class EmptySlice(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


def rat(value) -> Fraction:
    """Parse ``"p/q"``, ``"n"``, ints and Fractions into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_point(coords: Iterable) -> Point:
    return tuple(rat(c) for c in coords)


@dataclass(frozen=True)
class LinForm:
    """Affine functional ``x -> coeffs . x + constant``."""

    coeffs: tuple
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_point(self.coeffs))
        object.__setattr__(self, "constant", rat(self.constant))

    def __call__(self, p: Sequence[Fraction]) -> Fraction:
        if len(p) != len(self.coeffs):
            raise DimensionMismatch(f"point of dim {len(p)} vs form of dim {len(self.coeffs)}")
        return sum((c * x for c, x in zip(self.coeffs, p)), self.constant)

    def __neg__(self) -> LinForm:
        return LinForm(tuple(-c for c in self.coeffs), -self.constant)


@dataclass(frozen=True)
class Face:
    vertices: tuple  # sorted vertex indices
    dim: int

    @cached_property
    def vset(self) -> frozenset:
        return frozenset(self.vertices)

    def __le__(self, other: Face) -> bool:
        return self.vset <= other.vset

    def __lt__(self, other: Face) -> bool:
        return self.vset < other.vset

    @property
    def key(self):
        return (self.dim, self.vertices)


class FaceLattice:
    """All faces of a polytope, from the empty face up to the polytope."""

    def __init__(self, faces: Iterable[Face]):
        self.faces = tuple(sorted(set(faces), key=lambda f: f.key))
        self.index = {f.vertices: i for i, f in enumerate(self.faces)}
        self.dim = self.faces[-1].dim
        by_dim: dict[int, list[int]] = {}
        for i, f in enumerate(self.faces):
            by_dim.setdefault(f.dim, []).append(i)
        self._by_dim = by_dim
        covers = []
        for k in range(-1, self.dim):
            for i in by_dim.get(k, ()):
                fi = self.faces[i].vset
                for j in by_dim.get(k + 1, ()):
                    if fi <= self.faces[j].vset:
                        covers.append((i, j))
        self.covers = tuple(covers)
        self.up = {i: [] for i in range(len(self.faces))}
        self.down = {i: [] for i in range(len(self.faces))}
        for i, j in self.covers:
            self.up[i].append(j)
            self.down[j].append(i)

    def __len__(self):
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def faces_of_dim(self, k: int) -> list[Face]:
        return [self.faces[i] for i in self._by_dim.get(k, ())]

    def f_vector(self) -> tuple:
        """Face counts for dimensions -1, 0, ..., d."""
        return tuple(len(self._by_dim.get(k, ())) for k in range(-1, self.dim + 1))

    @property
    def empty(self) -> Face:
        return self.faces[0]

    @property
    def top(self) -> Face:
        return self.faces[-1]

    def facets(self) -> list[Face]:
        return self.faces_of_dim(self.dim - 1)

    def face(self, vertices: Iterable[int]) -> Face | None:
        return self._face_or_none(tuple(sorted(set(vertices))))

    def _face_or_none(self, key):
        i = self.index.get(key)
        return None if i is None else self.faces[i]

    def smallest_face_containing(self, vertices: Iterable[int]) -> Face:
        vs = frozenset(vertices)
        best = None
        for f in self.faces:
            if vs <= f.vset and (best is None or len(f.vertices) < len(best.vertices)):
                best = f
        return best

    def hasse(self) -> tuple[list[int], list[tuple[int, int]]]:
        return [f.dim for f in self.faces], list(self.covers)

    def to_json(self) -> dict:
        return {
            "faces": [{"dim": f.dim, "vertices": list(f.vertices)} for f in self.faces],
            "covers": [list(c) for c in self.covers],
        }


@dataclass(frozen=True)
class Polytope:
    vertices: tuple
    lattice: FaceLattice
    ambient_dim: int

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def edges(self) -> list[Face]:
        return self.lattice.faces_of_dim(1)

    def face_polytope(self, face: Face) -> Polytope:
        """The face as a polytope in its own right, vertices renumbered in
        increasing order of their index in ``self``."""
        local = {v: i for i, v in enumerate(face.vertices)}
        faces = [
            Face(tuple(local[v] for v in g.vertices), g.dim)
            for g in self.lattice
            if g.vset <= face.vset
        ]
        return Polytope(
            tuple(self.vertices[v] for v in face.vertices), FaceLattice(faces), self.ambient_dim
        )


# ---------------------------------------------------------------- linear algebra


def _row_reduce(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def affine_rank(points: Sequence[Point]) -> int:
    """Affine dimension of a finite point set (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    if not diffs:
        return 0
    return len(_row_reduce(diffs)[1])


def affine_chart(points: Sequence[Point]) -> tuple[int, list[int]]:
    """Affine dimension and coordinate indices whose projection is injective
    on the affine hull of ``points``."""
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    if not diffs:
        return 0, []
    _, pivots = _row_reduce(diffs)
    return len(pivots), pivots


def _inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ArithmeticError("singular matrix")
    return [row[n:] for row in red]


def _primitive(v: Sequence[int]) -> tuple:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


# ---------------------------------------------------------------- hull engine


@dataclass
class _Hull:
    dim: int
    facets: list[int]  # bitmasks of point indices
    normals: list[tuple]  # integer (b, -a): b - a.x >= 0 in chart coordinates
    vertex_flags: list[bool]
    chart: list[int]


def _homogenize(points: Sequence[Sequence[Fraction]]) -> list[tuple]:
    rows = []
    for p in points:
        h = (Fraction(1),) + tuple(p)
        m = math.lcm(*(c.denominator for c in h))
        rows.append(tuple(int(c * m) for c in h))
    return rows


def _facet_cone(rows: list[tuple], m: int) -> list[tuple[tuple, int]]:
    """Extreme rays of {y : y.row >= 0 for every row} by double description.

    ``rows`` must span R^m. Returns (ray, zero-set bitmask) pairs.
    """
    basis: list[int] = []
    for i, r in enumerate(rows):
        trial = [list(map(Fraction, rows[j])) for j in basis + [i]]
        if len(_row_reduce(trial)[1]) == len(basis) + 1:
            basis.append(i)
            if len(basis) == m:
                break
    inv = _inverse([list(map(Fraction, rows[j])) for j in basis])
    rays, zeros = [], []
    for k in range(m):
        col = [inv[r][k] for r in range(m)]
        scale = math.lcm(*(c.denominator for c in col))
        rays.append(_primitive([int(c * scale) for c in col]))
        zeros.append(sum(1 << basis[j] for j in range(m) if j != k))

    in_basis = set(basis)
    for i in range(len(rows)):
        if i in in_basis:
            continue
        row = rows[i]
        vals = [_dot(r, row) for r in rays]
        bit = 1 << i
        if all(v >= 0 for v in vals):
            zeros = [z | bit if v == 0 else z for z, v in zip(zeros, vals)]
            continue
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays, new_zeros = [], []
        for a in pos:
            for b in neg:
                common = zeros[a] & zeros[b]
                if common.bit_count() < m - 2:
                    continue
                if any(
                    c != a and c != b and common & zeros[c] == common for c in range(len(rays))
                ):
                    continue
                va, vb = vals[a], vals[b]
                r = _primitive([va * y - vb * x for x, y in zip(rays[a], rays[b])])
                new_rays.append(r)
                new_zeros.append(common | bit)
        keep = [k for k, v in enumerate(vals) if v >= 0]
        rays = [rays[k] for k in keep] + new_rays
        zeros = [zeros[k] | bit if vals[k] == 0 else zeros[k] for k in keep] + new_zeros
    return list(zip(rays, zeros))


def _hull(points: Sequence[Point]) -> _Hull:
    """Facets (as point-index bitmasks) and vertex flags of conv(points)."""
    d, chart = affine_chart(points)
    n = len(points)
    if d == 0:
        return _Hull(0, [], [], [True] * n, chart)
    local = [[p[c] for c in chart] for p in points]
    rows = _homogenize(local)
    cone = _facet_cone(rows, d + 1)
    facets = [z for _, z in cone]
    normals = [r for r, _ in cone]
    full = (1 << n) - 1
    flags = []
    for i in range(n):
        inter = full
        touched = False
        for z in facets:
            if z >> i & 1:
                inter &= z
                touched = True
        flags.append(touched and inter == 1 << i)
    return _Hull(d, facets, normals, flags, chart)


def _bits(mask: int) -> tuple:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _check_distinct(points: Sequence[Point]) -> None:
    seen = {}
    for i, p in enumerate(points):
        if p in seen:
            raise DegenerateInput(f"points {seen[p]} and {i} coincide")
        seen[p] = i


def face_lattice_from_vertices(vertices: Sequence[Point]) -> FaceLattice:
    """Complete face lattice of conv(vertices); every input point must be a vertex."""
    pts = [as_point(p) for p in vertices]
    if len(pts) < 1:
        raise DegenerateInput("need at least one point")
    if len({len(p) for p in pts}) != 1:
        raise DimensionMismatch("points of differing ambient dimension")
    _check_distinct(pts)
    h = _hull(pts)
    for i, ok in enumerate(h.vertex_flags):
        if not ok:
            raise NotAVertex(i)
    n = len(pts)
    if h.dim == 0:
        return FaceLattice([Face((), -1), Face((0,), 0)])

    facet_sets = sorted(set(h.facets))
    seen = set(facet_sets)
    frontier = list(facet_sets)
    while frontier:
        nxt = []
        for f in frontier:
            for g in facet_sets:
                x = f & g
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    seen.add(0)
    seen.add((1 << n) - 1)
    local = [tuple(p[c] for c in h.chart) for p in pts]
    faces = []
    for mask in seen:
        idx = _bits(mask)
        faces.append(Face(idx, affine_rank([local[i] for i in idx])))
    return FaceLattice(faces)


def polytope_from_vertices(vertices: Sequence[Point]) -> Polytope:
    pts = tuple(as_point(p) for p in vertices)
    lattice = face_lattice_from_vertices(pts)
    return Polytope(pts, lattice, len(pts[0]))


def convex_hull_vertices(points: Iterable[Point]) -> list[Point]:
    """The vertices of conv(points), sorted; duplicates and non-vertices dropped."""
    pts = sorted({as_point(p) for p in points})
    if not pts:
        raise DegenerateInput("need at least one point")
    h = _hull(pts)
    return [p for p, ok in zip(pts, h.vertex_flags) if ok]


def facet_inequalities(P: Polytope) -> list[tuple[tuple, Fraction, Face]]:
    """For a full-dimensional polytope: (a, b, facet) with a.x <= b on P."""
    if P.dim != P.ambient_dim:
        raise DimensionMismatch("facet inequalities need a full-dimensional polytope")
    h = _hull(list(P.vertices))
    out = []
    for normal, mask in zip(h.normals, h.facets):
        b, a = Fraction(normal[0]), tuple(Fraction(-x) for x in normal[1:])
        out.append((a, b, P.lattice.face(_bits(mask))))
    return sorted(out, key=lambda t: t[2].key)


# ---------------------------------------------------------------- operations


def face_of_linform(P: Polytope, mu: LinForm, sense: str = "min") -> Face:
    """The face of P on which ``mu`` attains its minimum (or maximum)."""
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    vals = [mu(v) for v in P.vertices]
    best = min(vals) if sense == "min" else max(vals)
    face = P.lattice.face(i for i, x in enumerate(vals) if x == best)
    assert face is not None, "optimal vertex set is not a face"
    return face


def slice_at_level(P: Polytope, ell: LinForm, c) -> Polytope:
    """P intersected with the hyperplane ell = c, for min ell < c < max ell."""
    c = rat(c)
    vals = [ell(v) for v in P.vertices]
    if not min(vals) < c < max(vals):
        raise EmptySlice(f"level {c} outside the open range ({min(vals)}, {max(vals)})")
    pts = {P.vertices[i] for i, x in enumerate(vals) if x == c}
    for e in P.edges():
        a, b = e.vertices
        va, vb = vals[a], vals[b]
        if (va - c) * (vb - c) < 0:
            t = (c - va) / (vb - va)
            pa, pb = P.vertices[a], P.vertices[b]
            pts.add(tuple(x + t * (y - x) for x, y in zip(pa, pb)))
    return polytope_from_vertices(sorted(pts))


def minkowski_sum(polytopes: Sequence[Polytope]) -> Polytope:
    """conv of all vertex sums, accumulated one summand at a time."""
    if not polytopes:
        raise DegenerateInput("empty Minkowski sum")
    n = polytopes[0].ambient_dim
    if any(P.ambient_dim != n for P in polytopes):
        raise DimensionMismatch("summands live in different ambient spaces")
    acc = list(polytopes[0].vertices)
    for P in polytopes[1:]:
        cand = {tuple(x + y for x, y in zip(a, b)) for a in acc for b in P.vertices}
        acc = convex_hull_vertices(cand)
    return polytope_from_vertices(sorted(acc))


def _hasse_graph(lattice) -> nx.DiGraph:
    dims, covers = lattice.hasse()
    g = nx.DiGraph()
    for i, k in enumerate(dims):
        g.add_node(i, dim=k)
    g.add_edges_from(covers)
    return g


def _signature(g: nx.DiGraph) -> list:
    return sorted((g.nodes[v]["dim"], g.in_degree(v), g.out_degree(v)) for v in g)


def _atom_sets(dims: list[int], covers) -> list[frozenset]:
    down: dict = {}
    for a, b in covers:
        down.setdefault(b, []).append(a)
    order = sorted(range(len(dims)), key=lambda i: dims[i])
    atoms: list = [frozenset()] * len(dims)
    for i in order:
        if dims[i] == 0:
            atoms[i] = frozenset((i,))
        else:
            atoms[i] = frozenset().union(*(atoms[j] for j in down.get(i, ())))
    return atoms


def _coatom_rows(dims, covers, atoms) -> list[frozenset]:
    top = max(range(len(dims)), key=lambda i: dims[i])
    return [atoms[a] for a, b in covers if b == top]


def _facet_matchings(rows1: list, rows2: list, atoms1: list, atoms2: list):
    """Yield atom bijections induced by facet bijections that preserve the
    multiset of atom membership patterns at every step of the search."""
    n = len(rows1)
    if n != len(rows2) or len(atoms1) != len(atoms2):
        return

    def patterns(rows, chosen, atoms):
        return Counter(tuple(x in rows[i] for i in chosen) for x in atoms)

    def extend(img: list):
        k = len(img)
        if k == n:
            pat1 = {x: tuple(x in r for r in rows1) for x in atoms1}
            by_pat2 = {tuple(x in rows2[j] for j in img): x for x in atoms2}
            if len(by_pat2) == len(atoms2) and len(set(pat1.values())) == len(atoms1):
                yield {x: by_pat2[p] for x, p in pat1.items()}
            return
        used = set(img)
        want = patterns(rows1, range(k + 1), atoms1)
        for j in range(n):
            if j in used or len(rows2[j]) != len(rows1[k]):
                continue
            if patterns(rows2, img + [j], atoms2) == want:
                yield from extend(img + [j])

    yield from extend([])


def _extend(dims1, cov1, at1, dims2, cov2, at2, atom_map) -> dict | None:
    """Extend a bijection of atoms to the whole lattice, if possible."""
    lookup = {s: j for j, s in enumerate(at2)}
    if len(lookup) != len(at2) or len(set(at1)) != len(at1):
        return None
    full = {}
    for i, s in enumerate(at1):
        j = lookup.get(frozenset(atom_map[a] for a in s))
        if j is None or dims2[j] != dims1[i]:
            return None
        full[i] = j
    if set(full.values()) != set(range(len(dims2))):
        return None
    if {(full[a], full[b]) for a, b in cov1} != set(map(tuple, cov2)):
        return None
    return full


def _separated(rows, atoms, atom_sets) -> bool:
    """Atoms are told apart by coatoms and elements by their atoms."""
    pats = {tuple(x in r for r in rows) for x in atoms}
    return len(pats) == len(atoms) and len(set(atom_sets)) == len(atom_sets)


def lattice_isomorphic(L1, L2) -> tuple[bool, dict | None]:
    """Decide isomorphism of two graded lattices given via ``hasse()``.

    Coatoms are matched first, pruning on atom incidence patterns; a match
    that extends to all elements and covers is a lattice isomorphism.  For
    lattices whose atoms and elements are separated by coatoms and atoms
    (all polytope face lattices) that search is exhaustive; otherwise the
    full Hasse diagram is searched.  Returns a witness bijection
    (element index of L1 -> element index of L2).
    """
    (d1, c1), (d2, c2) = L1.hasse(), L2.hasse()
    g1, g2 = _hasse_graph(L1), _hasse_graph(L2)
    if _signature(g1) != _signature(g2):
        return False, None
    at1, at2 = _atom_sets(d1, c1), _atom_sets(d2, c2)
    rows1, rows2 = _coatom_rows(d1, c1, at1), _coatom_rows(d2, c2, at2)
    atoms1 = [i for i, k in enumerate(d1) if k == 0]
    atoms2 = [i for i, k in enumerate(d2) if k == 0]
    for atom_map in _facet_matchings(rows1, rows2, atoms1, atoms2):
        full = _extend(d1, c1, at1, d2, c2, at2, atom_map)
        if full is not None:
            return True, full
    if _separated(rows1, atoms1, at1) and _separated(rows2, atoms2, at2):
        # every isomorphism would have been found by the facet search
        return False, None
    mapping = vf2pp_isomorphism(g1, g2, node_label="dim")
    return mapping is not None, mapping
