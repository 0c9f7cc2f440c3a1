from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import built, oriented
from vertexposet.builders import (
    BadArity,
    BadParameter,
    BuildError,
    Expr,
    ParseError,
    build,
    dumps,
    from_json,
    load_json,
    parse,
    save_json,
)
from vertexposet.corpus import suite
from vertexposet.exactgeom import lattice_isomorphic
from vertexposet.oriented import MINUS, is_stratification, orient


def test_parse_tree():
    e = parse("prod(cube(2),simplex(1))")
    assert e == Expr("prod", (Expr("cube", (2,)), Expr("simplex", (1,))))
    assert len(e.leaves()) == 2
    assert str(e) == "prod(cube(2),simplex(1))"


def test_parse_whitespace_and_atoms():
    assert parse("  pyrMax( pyrMin(quadSep) ) ") == Expr("pyrMax", (Expr("pyrMin", (Expr("quadSep"),)),))


@pytest.mark.parametrize("text", ["cube(0)", "simplex(0)", "ngon(2)", "trapezohedron(2)", "cube(-1)"])
def test_bad_parameter(text):
    with pytest.raises(BadParameter):
        parse(text)


@pytest.mark.parametrize("text", ["prod(cube(2))", "pyrMin(cube(1),cube(1))", "cube(1,2)", "quadSep(1)"])
def test_bad_arity(text):
    with pytest.raises(BadArity):
        parse(text)


@pytest.mark.parametrize(
    "text,line,col",
    [("prod(cube(2)", 1, 13), ("cube(x)", 1, 6), ("hexagon(3)", 1, 1), ("cube(2) junk", 1, 9),
     ("prod(cube(2),\n  nope(1))", 2, 3)],
)
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_square_product_is_generic_and_stratified():
    op = oriented("prod(simplex(1),simplex(1))")
    assert len(set(op.values)) == 4
    assert lattice_isomorphic(op.lattice, oriented("quadSep").lattice)[0]
    assert (op.source, op.sink) not in op.directed_edges
    assert op.analysis.report.all_true


def test_double_pyramid_dimension():
    op = oriented("pyrMax(pyrMin(quadSep))")
    assert op.dim == 4 and op.n == 6
    apex_min, apex_max = 4, 5
    assert (op.source, op.sink) == (apex_min, apex_max)


def test_trapezohedron_four():
    P, ell = built("trapezohedron(4)")
    assert len(P.vertices) == 10
    facets = P.lattice.facets()
    assert len(facets) == 8 and all(len(f.vertices) == 4 for f in facets)
    op = orient(P, ell)
    heights = sorted(op.values)
    assert heights[0] == -1 and heights[-1] == 1


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_trapezohedra_have_kite_facets(n):
    P, _ = built(f"trapezohedron({n})")
    assert P.lattice.f_vector() == (1, 2 * n + 2, 4 * n, 2 * n, 1)


@pytest.mark.parametrize("n", range(3, 9))
def test_ngon(n):
    op = oriented(f"ngon({n})")
    assert op.lattice.f_vector() == (1, n, n, 1)
    if n >= 5:
        assert not is_stratification(op, op.analysis.bb, MINUS)[0]


def test_nostrat5_face_census():
    P, _ = built("nostrat5")
    assert P.lattice.f_vector() == (1, 5, 9, 6, 1)
    assert all(len(f.vertices) == 3 for f in P.lattice.facets())


@pytest.mark.parametrize("expr", suite("full"))
def test_every_build_orients(expr):
    op = oriented(expr)
    assert op.source != op.sink or op.n == 1


@pytest.mark.parametrize(
    "expr",
    ["prod(quadSep,simplex(1))", "prod(trapezohedron(3),simplex(1))", "prod(simplex(2),cube(2))",
     "pyrMin(trapezohedron(4))", "pyrMax(trapezohedron(4))", "pyrMax(prod(simplex(1),simplex(2)))"],
)
def test_constructors_preserve_stratification(expr):
    inner = parse(expr).args
    assert all(orient(*build(a)).analysis.stratified for a in inner)
    assert oriented(expr).analysis.stratified


def _simple(op):
    return all(sum(1 for e in op.directed_edges if v in e) == op.dim for v in range(op.n))


def test_products_of_simple_are_simple():
    for e in ("prod(simplex(2),simplex(1))", "prod(cube(2),simplex(2))", "prod(simplex(3),simplex(1))"):
        assert _simple(oriented(e))


def test_pyramid_apex_degree():
    op = oriented("pyrMin(cube(2))")
    assert not _simple(op)
    assert sum(1 for e in op.directed_edges if op.source in e) == 4
    assert _simple(oriented("pyrMin(simplex(2))"))


def test_json_round_trip(tmp_path):
    P, ell = built("trapezohedron(4)")
    path = tmp_path / "t4.json"
    save_json(path, P, ell, "trapezohedron(4)")
    Q, ell2 = load_json(path)
    assert lattice_isomorphic(P.lattice, Q.lattice)[0]
    assert [ell(v) for v in P.vertices] == [ell2(v) for v in Q.vertices]
    assert dumps(Q, ell2, "trapezohedron(4)") == path.read_text()


def test_json_uses_exact_strings():
    P, ell = built("quadSep")
    doc = json.loads(dumps(P, ell))
    assert doc["vertices"][0] == ["0", "-1/5"]
    assert doc["ell"] == {"coeffs": ["0", "1"], "constant": "0"}


def test_malformed_documents_rejected(tmp_path):
    with pytest.raises(BuildError):
        from_json({"vertices": [["1", "x"]], "ell": {"coeffs": ["1", "0"]}})
    with pytest.raises(BuildError):
        from_json({"vertices": [["1", "2"]], "ell": {"coeffs": ["1"]}})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(BuildError):
        load_json(bad)


leaf = st.sampled_from(["simplex(1)", "simplex(2)", "cube(2)", "quadSep", "trapezohedron(3)", "ngon(3)"])
exprs = st.recursive(
    leaf,
    lambda inner: st.one_of(
        st.builds(lambda a: f"pyrMin({a})", inner),
        st.builds(lambda a: f"pyrMax({a})", inner),
        st.builds(lambda a, b: f"prod({a},{b})", inner, inner),
    ),
    max_leaves=2,
)


@settings(max_examples=30, deadline=None)
@given(exprs)
def test_stratification_preserved_by_constructors(text):
    e = parse(text)
    if len(build(e)[0].vertices) > 24:
        return
    op = orient(*build(e))
    assert op.analysis.stratified
    assert str(e) == text
