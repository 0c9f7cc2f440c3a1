"""Example polytopes, closure constructions and their file format.

Expressions follow the grammar::

    expr := simplex(n) | cube(n) | ngon(n) | trapezohedron(n)
          | quadSep | quadAdj | nostrat5
          | prod(expr, expr) | pyrMin(expr) | pyrMax(expr)

``build`` returns a pair ``(Polytope, LinForm)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .exactgeom import (
    LinForm,
    Polytope,
    facet_inequalities,
    polytope_from_vertices,
    rat,
    rat_str,
)
from .oriented import OrientationError, orient

F = Fraction


class BuildError(Exception):
    pass


class ParseError(BuildError):
    def __init__(self, line: int, col: int, expected: str, text: str = ""):
        super().__init__(f"{line}:{col}: expected {expected}")
        self.line, self.col, self.expected = line, col, expected


class BadArity(BuildError):
    pass


class BadParameter(BuildError):
    pass


INT_CTORS = {"simplex": 1, "cube": 1, "ngon": 3, "trapezohedron": 3}  # name -> minimal n
ATOMS = ("quadSep", "quadAdj", "nostrat5")
UNARY = ("pyrMin", "pyrMax")
BINARY = ("prod",)


@dataclass(frozen=True)
class Expr:
    name: str
    args: tuple = ()

    def __str__(self):
        if self.name in ATOMS:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"

    def leaves(self) -> list:
        if self.name in UNARY + BINARY:
            return [x for a in self.args for x in a.leaves()]
        return [self]


# ---------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, text: str):
        self.text, self.pos = text, 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        before = self.text[:pos]
        line = before.count("\n") + 1
        return line, pos - (before.rfind("\n") + 1) + 1

    def fail(self, expected, pos=None):
        line, col = self.where(pos)
        raise ParseError(line, col, expected, self.text)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch):
        if self.peek() != ch:
            self.fail(repr(ch))
        self.pos += 1

    def word(self, what, pred):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self.pos += 1
        if start == self.pos:
            self.fail(what)
        return self.text[start:self.pos], start

    def expr(self) -> Expr:
        name, start = self.word("constructor name", lambda c: c.isalnum() or c == "_")
        if name in ATOMS:
            if self.peek() == "(":
                raise BadArity(f"{name} takes no arguments")
            return Expr(name)
        if name in INT_CTORS:
            self.eat("(")
            tok, tpos = self.word("integer", lambda c: c.isdigit() or c == "-")
            try:
                n = int(tok)
            except ValueError:
                self.fail("integer", tpos)
            if self.peek() == ",":
                raise BadArity(f"{name} takes one integer argument")
            self.eat(")")
            if n < INT_CTORS[name]:
                raise BadParameter(f"{name}({n}): need n >= {INT_CTORS[name]}")
            return Expr(name, (n,))
        if name in UNARY or name in BINARY:
            want = 1 if name in UNARY else 2
            self.eat("(")
            args = [self.expr()]
            while self.peek() == ",":
                self.pos += 1
                args.append(self.expr())
            self.eat(")")
            if len(args) != want:
                raise BadArity(f"{name} takes {want} argument(s), got {len(args)}")
            return Expr(name, tuple(args))
        self.fail("constructor name", start)


def parse(text: str) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.peek():
        p.fail("end of input")
    return e


# ---------------------------------------------------------------- constructors


def _unit_circle_point(theta: float, denom: int = 10**4) -> tuple:
    """A rational point on the unit circle close to angle theta."""
    t = F(math.tan(theta / 2)).limit_denominator(denom)
    return ((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t))


def simplex(n: int):
    verts = [tuple(F(0) for _ in range(n))]
    for i in range(n):
        verts.append(tuple(F(int(j == i)) for j in range(n)))
    return polytope_from_vertices(verts), LinForm(tuple(range(1, n + 1)))


def cube(n: int):
    verts = [tuple(F(x) for x in bits) for bits in product((0, 1), repeat=n)]
    return polytope_from_vertices(verts), LinForm((1,) * n)


def ngon(n: int):
    # the angular offset keeps every vertex away from the branch cut of tan
    verts = [_unit_circle_point(2 * math.pi * k / n + 0.1) for k in range(n)]
    P = polytope_from_vertices(verts)
    for k in range(2, 100):
        ell = LinForm((F(1, k), F(1)))
        try:
            orient(P, ell)
        except OrientationError:
            continue
        return P, ell
    raise BadParameter(f"no generic functional found for ngon({n})")


def quad_sep():
    # labels C, D, B, A of the figure; the source C and sink A are not adjacent
    verts = [(F(0), F(-1, 5)), (F(1), F(-1)), (F(2), F(1, 5)), (F(1), F(1))]
    return polytope_from_vertices(verts), LinForm((0, 1))


def quad_adj():
    # labels A, D, C, B; the source D and sink A share an edge
    verts = [(F(0), F(1)), (F(0), F(-1)), (F(2), F(-1, 2)), (F(2), F(1, 2))]
    return polytope_from_vertices(verts), LinForm((0, 1))


def nostrat5():
    """Bipyramid over the triangle ACE with apexes B (source) and D (sink).

    Vertex order A, B, C, D, E with functional values 1, 0, 2, 6, 3.
    """
    verts = [(1, 0, 0), (0, 0, 0), (0, 1, 0), (1, 1, 1), (0, 0, 1)]
    return polytope_from_vertices([tuple(F(x) for x in v) for v in verts]), LinForm((1, 2, 3))


def trapezohedron(n: int):
    """Polar dual of a rational n-gonal antiprism; functional = height."""
    delta = 0.05
    pts = []
    for k in range(n):
        x, y = _unit_circle_point(2 * math.pi * k / n + delta)
        pts.append((x, y, F(1)))
        x, y = _unit_circle_point(2 * math.pi * (k + F(1, 2)) / n + delta)
        pts.append((x, y, F(-1)))
    antiprism = polytope_from_vertices(pts)
    dual = sorted(tuple(a_i / b for a_i in a) for a, b, _ in facet_inequalities(antiprism))
    P = polytope_from_vertices(dual)
    if len(P.vertices) != 2 * n + 2 or len(P.lattice.facets()) != 2 * n:
        raise BadParameter(f"trapezohedron({n}): rational realization failed")
    return P, LinForm((0, 0, 1))


def _product(A, B):
    (P, l1), (Q, l2) = A, B
    v1 = sorted({l1(v) for v in P.vertices})
    gap = min((b - a for a, b in zip(v1, v1[1:])), default=F(1))
    vals2 = [l2(v) for v in Q.vertices]
    spread = max(vals2) - min(vals2)
    k = 1
    while F(1, 2**k) * spread >= gap:
        k += 1
    eps = F(1, 2**k)
    verts = [p + q for p in P.vertices for q in Q.vertices]
    ell = LinForm(l1.coeffs + tuple(eps * c for c in l2.coeffs), l1.constant + eps * l2.constant)
    return polytope_from_vertices(verts), ell


def _pyramid(A, lower: bool):
    P, ell = A
    n = len(P.vertices)
    centroid = tuple(sum(v[i] for v in P.vertices) / n for i in range(P.ambient_dim))
    vals = [ell(v) for v in P.vertices]
    target = min(vals) - 1 if lower else max(vals) + 1
    lam = target - ell(centroid)
    verts = [v + (F(0),) for v in P.vertices] + [centroid + (F(1),)]
    return polytope_from_vertices(verts), LinForm(ell.coeffs + (lam,), ell.constant)


def build(e: Expr | str):
    if isinstance(e, str):
        e = parse(e)
    if e.name == "simplex":
        return simplex(*e.args)
    if e.name == "cube":
        return cube(*e.args)
    if e.name == "ngon":
        return ngon(*e.args)
    if e.name == "trapezohedron":
        return trapezohedron(*e.args)
    if e.name == "quadSep":
        return quad_sep()
    if e.name == "quadAdj":
        return quad_adj()
    if e.name == "nostrat5":
        return nostrat5()
    if e.name == "prod":
        return _product(build(e.args[0]), build(e.args[1]))
    if e.name == "pyrMin":
        return _pyramid(build(e.args[0]), lower=True)
    if e.name == "pyrMax":
        return _pyramid(build(e.args[0]), lower=False)
    raise BadParameter(f"unknown constructor {e.name}")


def build_oriented(e: Expr | str):
    return orient(*build(e))


# ---------------------------------------------------------------- JSON


def to_json(P: Polytope, ell: LinForm, name: str | None = None) -> dict:
    doc = {
        "ambient_dim": P.ambient_dim,
        "vertices": [[rat_str(x) for x in v] for v in P.vertices],
        "ell": {"coeffs": [rat_str(c) for c in ell.coeffs], "constant": rat_str(ell.constant)},
    }
    if name is not None:
        doc["name"] = name
    return doc


def from_json(doc: dict):
    try:
        verts = [tuple(rat(x) for x in v) for v in doc["vertices"]]
        ell = LinForm(tuple(rat(c) for c in doc["ell"]["coeffs"]), rat(doc["ell"].get("constant", "0")))
        dim = int(doc.get("ambient_dim", len(ell.coeffs)))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise BuildError(f"malformed polytope document: {exc}") from exc
    if any(len(v) != dim for v in verts) or len(ell.coeffs) != dim:
        raise BuildError("coordinate lengths disagree with ambient_dim")
    return polytope_from_vertices(verts), ell


def dumps(P: Polytope, ell: LinForm, name: str | None = None) -> str:
    return json.dumps(to_json(P, ell, name), indent=2, sort_keys=True) + "\n"


def save_json(path, P: Polytope, ell: LinForm, name: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(P, ell, name))


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise BuildError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise BuildError(f"{path}: expected a JSON object")
    return from_json(doc)
