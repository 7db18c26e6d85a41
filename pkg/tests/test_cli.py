import json

import pytest

from trmod.cli import main


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture()
def matrix_file(tmp_path):
    def make(entries, name="m.json"):
        rows, cols = len(entries), len(entries[0]) if entries else 0
        return write_json(tmp_path / name,
                          {"rows": rows, "cols": cols, "entries": entries})
    return make


def run(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_ring_check(capsys):
    code, rep = run(capsys, "ring", "check", "S:2")
    assert code == 0
    assert rep["result"]["hilbert_series"] == [1, 3, 2]
    assert rep["result"]["admits_nontrivial_tr"] is True
    assert rep["command"] == "ring"
    assert "timing_seconds" in rep


def test_ring_from_file(capsys, tmp_path):
    ring = write_json(tmp_path / "ring.json", {
        "characteristic": 3,
        "variables": ["x", "y", "z"],
        "relations": ["x^2", "y^2", "z^2", "y*z"],
    })
    code, rep = run(capsys, "ring", "check", ring)
    assert code == 0
    assert rep["result"]["length"] == 6


def test_ring_invalid_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = run(capsys, "ring", "check", str(bad))
    assert code == 3
    assert "error" in rep["result"]


def test_ring_missing_file(capsys):
    code, rep = run(capsys, "ring", "check", "/nonexistent/ring.json")
    assert code == 3


def test_gorenstein_warning(capsys, tmp_path):
    ring = write_json(tmp_path / "gor.json", {
        "characteristic": 2,
        "variables": ["x", "y"],
        "relations": ["x^2", "y^2"],
    })
    code = main(["--json", "ring", "check", ring])
    captured = capsys.readouterr()
    assert "Gorenstein" in captured.err
    code = main(["--json", "--allow-gorenstein", "ring", "check", ring])
    captured = capsys.readouterr()
    assert "Gorenstein" not in captured.err


def test_ezd(capsys):
    code, rep = run(capsys, "ezd", "S:2")
    assert code == 0
    assert rep["result"]["count"] == 4
    assert rep["result"]["pairs"][0] == {"element": "x", "partner": "x"}


def test_tr_certified(capsys, matrix_file):
    m = matrix_file([["x", "z"], ["y", "x"]])
    code, rep = run(capsys, "tr", "S:2", m)
    assert code == 0
    res = rep["result"]
    assert res["verdict"] == "certified"
    assert "complete_resolution" in res
    positions = sorted(int(k) for k in res["complete_resolution"])
    assert positions == list(range(-3, 4))


def test_tr_refuted(capsys, matrix_file):
    m = matrix_file([["x*y"], ["x*z"]])
    code, rep = run(capsys, "tr", "S:2", m)
    assert code == 1
    assert rep["result"]["verdict"] == "refuted"
    assert rep["result"]["witness"]["kind"] == "k_summand"


def test_ext_with_gamma(capsys, matrix_file):
    n = matrix_file([["x"]], "n.json")
    m = matrix_file([["x"]], "m2.json")
    code, rep = run(capsys, "ext", "S:3", n, m)
    assert code == 0
    assert rep["result"]["rank"] == 3
    assert rep["result"]["gamma"] == 2


def test_ext_gamma_none_for_non_cyclic(capsys, matrix_file):
    n = matrix_file([["x", "y"], ["0", "x"]], "n.json")
    m = matrix_file([["x"]], "m2.json")
    code, rep = run(capsys, "ext", "S:3", n, m)
    assert code == 0
    assert rep["result"]["gamma"] is None


def test_pushout(capsys):
    code, rep = run(capsys, "pushout", "S:2",
                    "--u", "x", "--v", "x", "--alpha", "y")
    assert code == 0
    assert rep["result"]["matrix"]["entries"] == [["x", "y"], ["0", "x"]]
    assert rep["result"]["length"] == 6


def test_pushout_non_cocycle(capsys):
    code, rep = run(capsys, "pushout", "S:3",
                    "--u", "x + y", "--v", "x + y", "--alpha", "1")
    assert code == 3
    assert "cocycle" in rep["result"]["error"]


def test_filtrate_ut_input(capsys, matrix_file):
    m = matrix_file([["x", "y"], ["0", "x + y"]])
    code, rep = run(capsys, "filtrate", "S:2", m)
    assert code == 0
    assert rep["result"]["filtration"]["lengths"] == [3, 6]
    assert rep["result"]["filtration"]["quotients"] == ["x", "x + y"]


def test_filtrate_no_ut_form(capsys, matrix_file):
    m = matrix_file([["x", "z"], ["y", "x"]])
    code, rep = run(capsys, "filtrate", "S:2", m)
    assert code == 1
    assert rep["result"]["ut_form"] is None


def test_filtrate_finds_ut_form(capsys, matrix_file):
    m = matrix_file([["0", "x + y"], ["x", "y"]])
    code, rep = run(capsys, "filtrate", "S:2", m)
    assert code == 0
    assert rep["result"]["ut_form"] is not None


def test_classify(capsys):
    code, rep = run(capsys, "classify", "S:2")
    assert code == 0
    res = rep["result"]
    assert res["class_count"] == 24
    assert res["swap_check"]["all_match_expected"] is True
    assert "u \\ t" in res["grid"]


def test_classify_cyclic(capsys):
    code, rep = run(capsys, "classify", "S:2", "--cyclic")
    assert code == 0
    assert len(rep["result"]["cyclic"]) == 4


def test_mb(capsys):
    code, rep = run(capsys, "mb", "S:2", "--b", "4",
                    "--s", "x", "--t", "x", "--u", "y", "--v", "z")
    assert code == 0
    assert rep["result"]["matrix"]["entries"] == [
        ["x", "y", "0", "0"],
        ["0", "x", "z", "0"],
        ["0", "0", "x", "y"],
        ["0", "0", "0", "x"],
    ]
    assert rep["result"]["preconditions"]["satisfied"] is True


def test_equiv(capsys, matrix_file):
    m1 = matrix_file([["x", "z"], ["0", "x + y"]], "m1.json")
    m2 = matrix_file([["x", "z + x + y"], ["0", "x + y"]], "m2.json")
    code, rep = run(capsys, "equiv", "S:2", m1, m2)
    assert code == 0
    assert rep["result"]["equivalent"] is True
    m3 = matrix_file([["x", "0"], ["0", "x + y"]], "m3.json")
    code, rep = run(capsys, "equiv", "S:2", m1, m3)
    assert code == 1
    assert rep["result"]["equivalent"] is False


def test_equiv_budget_exceeded(capsys, matrix_file):
    m1 = matrix_file([["x", "z"], ["0", "x + y"]], "m1.json")
    code, rep = run(capsys, "--budget", "1", "equiv", "S:2", m1, m1)
    assert code == 2
    assert "budget" in rep["result"]["error"]


def test_malformed_matrix(capsys, tmp_path):
    bad = write_json(tmp_path / "bad.json",
                     {"rows": 2, "cols": 2, "entries": [["x"]]})
    code, rep = run(capsys, "tr", "S:2", bad)
    assert code == 3


def test_human_output(capsys):
    code = main(["ezd", "S:2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "count: 4" in out
