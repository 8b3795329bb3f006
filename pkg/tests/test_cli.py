import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from simkern.cli import main
from simkern.linalg import read_matrix_csv

from conftest import DELTA

DATA = Path(__file__).resolve().parent.parent / "data"


def run(argv, capsys):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


# --- gram ---------------------------------------------------------------------------

def test_gram_fbm(capsys):
    code, out, _ = run(["gram", DATA / "line3.csv", "--kernel", "fbm", "--a", "0.25"], capsys)
    assert code == 0
    assert "PSD: true" in out
    assert "min eigenvalue: 0.93606251" in out


def test_gram_out_file_and_single_point(tmp_path, capsys):
    pts = tmp_path / "one.csv"
    pts.write_text("0.5,1.5\n")
    target = tmp_path / "g.csv"
    code, out, _ = run(["gram", pts, "--kernel", "fbm", "--a", "0.5", "--out", target], capsys)
    assert code == 0 and "PSD: true" in out
    g = read_matrix_csv(target)
    assert g.n == 1


def test_gram_json_and_require_psd(tmp_path, capsys):
    code, out, _ = run(["gram", DATA / "line3.csv", "--kernel", "cauchy", "--json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["psd"] and len(data["gram"]) == 3
    # 1 - |x - y| on {1, -1, 2} has a negative eigenvalue
    spec = tmp_path / "k.json"
    spec.write_text(json.dumps({"kind": "complement",
                                "children": [{"kind": "euclidean"}]}))
    code, out, _ = run(["gram", DATA / "line3.csv", "--spec", spec, "--require-psd"], capsys)
    assert code == 1 and "PSD: false" in out
    code, _, _ = run(["gram", DATA / "line3.csv", "--spec", spec], capsys)
    assert code == 0


def test_gram_bad_inputs(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run(["gram", empty, "--kernel", "fbm"], capsys)[0] == 2
    assert run(["gram", tmp_path / "missing.csv", "--kernel", "fbm"], capsys)[0] == 2
    assert run(["gram", DATA / "line3.csv"], capsys)[0] == 2
    assert run(["gram", DATA / "line3.csv", "--kernel", "fbm", "--a", "1.5"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "rbf"}')
    code, _, err = run(["gram", DATA / "line3.csv", "--spec", bad], capsys)
    assert code == 2 and "unknown" in err
    assert run(["gram", DATA / "line3.csv", "--kernel", "rbf"], capsys)[0] == 2


def test_inline_overrides_spec_with_warning(tmp_path, capsys):
    spec = tmp_path / "k.json"
    spec.write_text(json.dumps({"kind": "fbm", "params": {"a": 0.75}}))
    code, out, err = run(["gram", DATA / "line3.csv", "--spec", spec, "--kernel", "fbm",
                          "--a", "0.25"], capsys)
    assert code == 0
    assert "warning" in err and "override" in err
    assert "0.93606251" in out


# --- audit --------------------------------------------------------------------------

def test_audit_exp_complement_passes(capsys):
    code, out, _ = run(["audit", "--random", "12", "--metric", "euclidean",
                        "--transform", "exp_complement"], capsys)
    assert code == 0 and "FAIL" not in out


def test_audit_points_file(capsys):
    code, _, _ = run(["audit", DATA / "line3.csv", "--metric", "euclidean",
                      "--metric-axioms", "--cnd"], capsys)
    assert code == 0


def test_audit_sup_cnd_fails_with_witness(capsys):
    code, out, _ = run(["audit", "--builtin", "x1-x5", "--cnd", "--json"], capsys)
    assert code == 1
    rep = json.loads(out)["reports"][0]
    cnd = [a for a in rep["axioms"] if a["name"] == "cnd"][0]
    assert cnd["verdict"] == "fail" and "vector" in cnd["witness"]
    code, _, _ = run(["audit", DATA / "x1_x5.json", "--metric", "sup", "--cnd"], capsys)
    assert code == 1


def test_audit_unknown_spec(tmp_path, capsys):
    spec = tmp_path / "m.json"
    spec.write_text('{"kind": "manhattan"}')
    assert run(["audit", "--random", "5", "--spec", spec], capsys)[0] == 2
    assert run(["audit", "--random", "5"], capsys)[0] == 2


# --- counterexample --------------------------------------------------------------

def test_counterexample_default(capsys):
    code, out, _ = run(["counterexample"], capsys)
    assert code == 0 and "verdict: reproduced" in out


def test_counterexample_json(capsys):
    code, out, _ = run(["counterexample", "--json"], capsys)
    data = json.loads(out)
    assert code == 0
    assert {"passed", "components"} <= data.keys()
    assert np.array_equal(np.array(data["delta"]), DELTA)


def test_counterexample_large_scale_exits_1(capsys):
    code, out, _ = run(["counterexample", "--t", "2"], capsys)
    assert code == 1


# --- graph ------------------------------------------------------------------------------

def test_graph_k23(capsys):
    code, out, _ = run(["graph", DATA / "k23_edges.csv", "--json"], capsys)
    data = json.loads(out)
    assert code == 0 and data["order"] == list("ABCDE")
    assert np.array_equal(np.array(data["distances"]), DELTA)
    code, out, _ = run(["graph", DATA / "k23_edges.csv", "--negative-type"], capsys)
    assert code == 1 and "positive eigenvalues: 2" in out


def test_graph_path_passes(capsys):
    code, out, _ = run(["graph", DATA / "path_edges.csv", "--negative-type"], capsys)
    assert code == 0 and "(necessary): pass" in out


def test_graph_disconnected(tmp_path, capsys):
    edges = tmp_path / "e.csv"
    edges.write_text("A,B\nC,D\n")
    code, _, err = run(["graph", edges], capsys)
    assert code == 2 and "disconnected" in err


# --- weighted-lb ---------------------------------------------------------------------------

def test_weighted_lb_random_passes(capsys):
    code, out, _ = run(["weighted-lb", "--random", "5", "--b", "0.7", "--json"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_weighted_lb_single_function_and_bad_b(tmp_path, capsys):
    one = tmp_path / "f.json"
    one.write_text('[{"kind": "linear", "breakpoints": [0, 1, 2], "values": [0, 1, 0]}]')
    assert run(["weighted-lb", one, "--b", "0.5"], capsys)[0] == 0
    assert run(["weighted-lb", "--random", "5", "--b", "1.5"], capsys)[0] == 2
    assert run(["weighted-lb", "--b", "0.5"], capsys)[0] == 2
    assert run(["weighted-lb", DATA / "x1_x5.json", "--b", "0.5"], capsys)[0] == 2


def test_weighted_lb_weights(capsys):
    for w in ("indicator:-1:1", "gaussian:0.5:2", '{"kind": "indicator", "lo": 0, "hi": 1}'):
        assert run(["weighted-lb", "--random", "3", "--weight", w], capsys)[0] == 0
    assert run(["weighted-lb", "--random", "3", "--weight", "triangle"], capsys)[0] == 2


# --- contract ---------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["counterexample", "--json"],
    ["audit", "--random", "8", "--seed", "7", "--metric", "euclidean", "--json"],
    ["weighted-lb", "--random", "4", "--seed", "3"],
])
def test_byte_identical_reruns(argv, capsys):
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second


def test_seed_and_tol_recorded(capsys):
    _, out, _ = run(["audit", "--random", "6", "--seed", "9", "--tol", "1e-10",
                     "--metric", "euclidean", "--json"], capsys)
    data = json.loads(out)
    assert data["seed"] == 9
    assert all(r["seed"] == 9 and r["tol"] == 1e-10 for r in data["reports"])


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "simkern", "counterexample"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "reproduced" in proc.stdout


@pytest.mark.parametrize("argv", [
    ["counterexample"],
    ["graph", DATA / "k23_edges.csv"],
    ["graph", DATA / "k23_edges.csv", "--negative-type"],
    ["weighted-lb", "--random", "3"],
    ["gram", DATA / "line3.csv", "--kernel", "fbm"],
])
def test_every_json_output_records_seed_and_tol(argv, capsys):
    _, out, _ = run(argv + ["--json", "--seed", "5", "--tol", "1e-8"], capsys)
    data = json.loads(out)
    assert data["seed"] == 5 and data["tol"] == 1e-8
