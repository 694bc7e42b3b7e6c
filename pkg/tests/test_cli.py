import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bregcc import bregman_distance, get_function
from bregcc.cli import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, check_expected, main

CORPUS = Path(__file__).resolve().parent.parent / "problems" / "regressions"
S1 = [[1, 1, 1], [1, 2, 1], [1, 1, 2]]


def _solve(tmp_path, problem, *extra):
    src = tmp_path / "problem.json"
    out = tmp_path / "result.json"
    src.write_text(json.dumps(problem))
    code = main(["solve", "--input", str(src), "--output", str(out), *extra])
    return code, json.loads(out.read_text())


def test_backward_cc(tmp_path):
    code, res = _solve(tmp_path, {"function": "negative_entropy", "points": S1,
                                  "operation": "backward_cc"})
    assert code == EXIT_OK
    assert res["status"] == "Unique"
    assert_allclose(res["points"][0], [1, 1 / math.log(2), 1 / math.log(2)], atol=1e-12)
    assert res["verification"]["verdict"] == "Pass"
    assert res["domain_flags"] == ["Interior"]
    for key in ("residuals", "radius", "operation", "function", "seed", "tol", "timing"):
        assert key in res


def test_empty_result_has_no_points(tmp_path):
    code, res = _solve(tmp_path, {"function": "burg_entropy",
                                  "points": [[1, 2, 1], [0.5, 1.5, 0.5], [1.5, 2.5, 1.5]],
                                  "operation": "backward_pseudo"})
    assert code == EXIT_OK
    assert res["status"] == "Empty"
    assert res["points"] == []
    assert res["solution_status"] == "outside_domain"
    assert_allclose(res["witness"], [-0.05566483, 10.71183652, -0.05566483], atol=1e-7)


def test_floats_round_trip(tmp_path):
    _, res = _solve(tmp_path, {"function": "negative_entropy", "points": [[1.0], [2.0]],
                               "operation": "forward_cc"})
    text = (tmp_path / "result.json").read_text()
    x = res["points"][0][0]
    assert float(repr(x)) == x
    assert repr(x) in text


def test_output_is_deterministic(tmp_path):
    problem = {"function": "fermi_dirac", "operation": "forward_cc",
               "points": [[0.25, 0.25, 0.25], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]]}
    _, a = _solve(tmp_path, problem, "--seed", "7")
    _, b = _solve(tmp_path, problem, "--seed", "7")
    a.pop("timing"), b.pop("timing")
    assert a == b
    assert a["seed"] == 7


def test_tol_flag(tmp_path):
    _, res = _solve(tmp_path, {"function": "energy", "points": [[0, 0], [2, 0]],
                               "operation": "backward_cc"}, "--tol", "1e-3")
    assert res["tol"] == 1e-3


def test_projection_with_flat(tmp_path):
    code, res = _solve(tmp_path, {"function": "negative_entropy", "points": [[1, 4]],
                                  "operation": "project_forward",
                                  "options": {"flat": {"base": [1, 1], "directions": [[1, 1]]}}})
    assert code == EXIT_OK
    assert_allclose(res["points"][0], [2.5, 2.5], atol=1e-12)


@pytest.mark.parametrize("problem", [
    {"function": "negative_entropy", "points": [[1, 1]], "operation": "teleport"},
    {"function": "no_such_function", "points": [[1, 1]], "operation": "backward_cc"},
    {"function": "negative_entropy", "points": [[-1, 1], [1, 1]], "operation": "backward_cc"},
    {"function": "negative_entropy", "points": [[1, 1], [1, 2, 3]], "operation": "backward_cc"},
    {"function": "negative_entropy", "points": [[1, 1]], "operation": "distance"},
    {"function": "burg_entropy", "points": [[1, 1], [2, 1]], "operation": "project_forward"},
    {"function": "negative_entropy", "points": [[1, 1]], "operation": "verify"},
    {"points": [[1, 1]], "operation": "backward_cc"},
])
def test_input_errors(tmp_path, problem):
    code, res = _solve(tmp_path, problem)
    assert code == EXIT_INPUT
    assert res["status"] == "Error"


def test_unreadable_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--input", str(bad), "--output", str(tmp_path / "o.json")]) == EXIT_INPUT


def test_solver_failure(tmp_path):
    # the flat lies entirely outside dom f, so the projection cannot succeed
    code, res = _solve(tmp_path, {"function": "negative_entropy", "points": [[1, 1]],
                                  "operation": "project_backward",
                                  "options": {"flat": {"base": [-1, 1], "directions": [[0, 1]]}}})
    assert code == EXIT_SOLVER
    assert res["status"] == "Error"


def test_emit_plot(tmp_path):
    code, res = _solve(tmp_path, {"function": "negative_entropy",
                                  "points": [[1, 1], [2, 1], [1, 2]],
                                  "operation": "backward_cc"}, "--emit-plot")
    assert code == EXIT_OK
    table = (tmp_path / res["plot_table"]).read_text().splitlines()
    assert table[0] == "ball_index,x,y"
    rows = np.array([[float(v) for v in line.split(",")] for line in table[1:]])
    assert set(rows[:, 0]) == {0, 1, 2}
    # every boundary point sits at distance ≈ radius from its ball center
    fn = get_function("negative_entropy")
    centers = np.array([[1, 1], [2, 1], [1, 2]], dtype=float)
    for row in rows[::9]:
        d = bregman_distance(fn, row[1:], centers[int(row[0])])
        assert d == pytest.approx(res["radius"], rel=1e-6)


def test_suite_on_corpus(tmp_path):
    out = tmp_path / "report.json"
    assert main(["suite", "--input", str(CORPUS), "--output", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["failed"] == 0
    assert report["passed"] == len(list(CORPUS.glob("*.json")))


def test_suite_flags_a_perturbed_expectation(tmp_path):
    corpus = tmp_path / "corpus"
    shutil.copytree(CORPUS, corpus)
    path = corpus / "01_negent_backward_cc.json"
    problem = json.loads(path.read_text())
    problem["expected"]["point"][1] += 1e-6
    path.write_text(json.dumps(problem))
    out = tmp_path / "report.json"
    assert main(["suite", "--input", str(corpus), "--output", str(out)]) == EXIT_SOLVER
    report = json.loads(out.read_text())
    failed = [c for c in report["cases"] if not c["pass"]]
    assert [c["file"] for c in failed] == ["01_negent_backward_cc.json"]


def test_suite_on_empty_directory(tmp_path):
    out = tmp_path / "report.json"
    assert main(["suite", "--input", str(tmp_path), "--output", str(out)]) == EXIT_INPUT


def test_check_expected():
    res = {"status": "Unique", "points": [[1.0, 2.0]], "value": 0.5}
    assert check_expected(res, {"status": "Unique", "point": [1, 2], "tol": 1e-12})[0]
    assert not check_expected(res, {"status": "Empty"})[0]
    assert not check_expected(res, {"point": [1, 2.1], "tol": 1e-3})[0]
    assert not check_expected(res, {"value": 0.6, "tol": 1e-3})[0]
    assert check_expected(res, None)[0]


def test_module_entry_point(tmp_path):
    src = tmp_path / "p.json"
    src.write_text(json.dumps({"function": "negative_entropy", "points": [[1, 1], [2, 3]],
                               "operation": "distance"}))
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "bregcc", "solve", "--input", str(src),
                           "--output", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    value = json.loads(out.read_text())["value"]
    # D((1,1),(2,3)) = Σ x ln(x/y) + y − x
    assert value == pytest.approx(math.log(1 / 2) + math.log(1 / 3) + 3, rel=1e-14)
