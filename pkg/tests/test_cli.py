from __future__ import annotations

import json

import pytest

from vertexposet.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def gen(tmp_path, capsys):
    def make(expr):
        path = tmp_path / (expr.replace("(", "_").replace(")", "").replace(",", "_") + ".json")
        code, _, err = run(capsys, "gen", expr, "-o", str(path))
        assert code == EXIT_OK and "wrote" in err
        return str(path)

    return make


@pytest.mark.parametrize("expr,n", [("cube(3)", 8), ("trapezohedron(4)", 10), ("prod(simplex(2),simplex(1))", 6)])
def test_gen_vertex_counts(capsys, expr, n):
    code, out, _ = run(capsys, "gen", expr)
    assert code == EXIT_OK
    assert len(json.loads(out)["vertices"]) == n


@pytest.mark.parametrize("expr", ["cube(0)", "prod(cube(2)", "nope", "cube(2,3)"])
def test_gen_bad_expressions(capsys, expr):
    code, out, err = run(capsys, "gen", expr)
    assert code == EXIT_USAGE and out == "" and err.startswith("error:")


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "poly", "x.json", "--kernel", "other")[0] == EXIT_USAGE


def test_analyze_nostrat5(capsys, gen):
    code, out, _ = run(capsys, "analyze", gen("nostrat5"))
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["conditions"] == [False, False, True, True, True, True, False, False]
    assert doc["assumption_I"] is False and doc["stratified"] is False


def test_analyze_pentagon_and_cube(capsys, gen):
    doc = json.loads(run(capsys, "analyze", gen("ngon(5)"))[1])
    assert doc["stratified"] is False
    doc = json.loads(run(capsys, "analyze", gen("cube(3)"))[1])
    assert doc["conditions"] == [True] * 8 and doc["stratified"] is True


def test_analyze_dot(capsys, gen):
    path = gen("cube(3)")
    code, out, _ = run(capsys, "analyze", path, "--dot", "skeleton")
    assert code == EXIT_OK and out.startswith("digraph") and out.count("->") == 12
    code, out, _ = run(capsys, "analyze", path, "--dot", "hasse")
    assert code == EXIT_OK and "digraph" in out


def test_chow_cube(capsys, gen):
    code, out, _ = run(capsys, "chow", gen("cube(3)"), "--oracle", "--simple")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["f_vector"] == [1, 6, 6, 1] and doc["simple"] and doc["oracle"]["isomorphic"]
    assert doc["simple_conditions"] == [True] * 4
    assert "triangle_counts" in doc


def test_chow_double_pyramid(capsys, gen):
    code, out, _ = run(capsys, "chow", gen("pyrMax(pyrMin(quadSep))"), "--simple")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["simple"] is False
    assert doc["triangle_counts"]["4->5"] == {"triangles": 4, "required": 3}


def test_chow_simplex_and_dot(capsys, gen):
    path = gen("simplex(3)")
    doc = json.loads(run(capsys, "chow", path)[1])
    assert doc["vertices"] == 4 and "triangle_counts" not in doc
    code, out, _ = run(capsys, "chow", path, "--dot")
    assert code == EXIT_OK and out.count(" -- ") == 4


def test_chow_requires_stratification(capsys, gen):
    code, out, err = run(capsys, "chow", gen("nostrat5"))
    assert code == EXIT_FAIL and out == "" and "not stratified" in err
    assert run(capsys, "poly", gen("ngon(6)"))[0] == EXIT_FAIL


def test_poly_simplex(capsys, gen):
    doc = json.loads(run(capsys, "poly", gen("simplex(4)"))[1])
    full = doc["intervals"][f"{doc['bottom']},{doc['top']}"]
    assert full["kappa"] == [0, 0, 0, -1, 1]
    assert full["H"] == [1, 3, 3, 1]
    assert full["f"] == [1] and full["g"] == [1]
    assert doc["is_kernel"] and doc["label"] == "kernel"


def test_poly_trapezohedron(capsys, gen):
    path = gen("trapezohedron(4)")
    doc = json.loads(run(capsys, "poly", path)[1])
    full = doc["intervals"][f"{doc['bottom']},{doc['top']}"]
    assert full["kappa"] == [-1, 3, -3, 1]
    assert full["chi"] == [-1, 4, -4, 1]
    assert full["flags"]["palindromic"] and full["flags"]["gamma"] == [1, 4]
    chi_doc = json.loads(run(capsys, "poly", path, "--kernel", "chi")[1])
    assert chi_doc["intervals"][f"{doc['bottom']},{doc['top']}"]["kappa"] == [-1, 4, -4, 1]


def test_poly_verify_main(capsys, gen):
    code, out, _ = run(capsys, "poly", gen("cube(3)"), "--verify-main")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["main_theorem"]["ok"]
    assert all(r["equal"] for r in doc["main_theorem"]["intervals"].values())


def test_poly_non_simple_is_labelled(capsys, gen):
    code, out, _ = run(capsys, "poly", gen("pyrMax(pyrMin(quadSep))"), "--verify-main")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["main_theorem"]["ok"]
    assert doc["is_kernel"] is False and doc["label"].startswith("not a kernel")
    assert doc["intervals"]["4,5"]["f"] is None


def test_verify_quick(capsys):
    code, out, err = run(capsys, "verify", "--suite", "quick")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["ok"] and doc["failed"] == 0
    assert doc["members"] == 22 and "PASS" in err and "FAIL" not in err


def test_verify_with_extra_file(capsys, gen):
    code, out, _ = run(capsys, "verify", "--suite", "quick", "--extra", gen("prod(simplex(1),simplex(2))"))
    assert code == EXIT_OK and json.loads(out)["members"] == 23


def test_verify_corrupt_extra(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [["1", "2"], ')
    assert run(capsys, "verify", "--extra", str(bad))[0] == EXIT_USAGE


@pytest.mark.parametrize(
    "content",
    ['{"vertices": "nope"}', "[]", '{"vertices": [["0"], ["0"]], "ell": {"coeffs": ["1"], "constant": "0"}}',
     '{"vertices": [["0", "0"], ["1", "0"], ["0", "1"]], "ell": {"coeffs": ["0", "0"], "constant": "0"}}'],
)
def test_bad_inputs_exit_2(capsys, tmp_path, content):
    path = tmp_path / "in.json"
    path.write_text(content)
    code, out, err = run(capsys, "analyze", str(path))
    assert code == EXIT_USAGE and out == "" and err.startswith("error:")


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "chow", str(tmp_path / "absent.json"))[0] == EXIT_USAGE


def test_vertex_limit(capsys, gen, monkeypatch):
    path = gen("cube(3)")
    monkeypatch.setenv("MONOPATH_MAX_VERTICES", "7")
    assert run(capsys, "analyze", path)[0] == EXIT_USAGE
    assert run(capsys, "gen", "cube(3)")[0] == EXIT_USAGE
    monkeypatch.setenv("MONOPATH_MAX_VERTICES", "lots")
    assert run(capsys, "analyze", path)[0] == EXIT_USAGE
    monkeypatch.setenv("MONOPATH_MAX_VERTICES", "8")
    assert run(capsys, "analyze", path)[0] == EXIT_OK


def test_output_is_deterministic_and_inputs_untouched(capsys, gen):
    path = gen("trapezohedron(4)")
    with open(path, "rb") as fh:
        before = fh.read()
    for argv in (["analyze", path], ["chow", path, "--oracle"], ["poly", path, "--verify-main"]):
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second and first[0] == EXIT_OK
    with open(path, "rb") as fh:
        assert fh.read() == before
    assert run(capsys, "gen", "trapezohedron(4)")[1].encode() == before
