import json

import pytest

from randturan import __version__
from randturan.cli import main
from randturan.graph import parse_graph


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def k22_file(tmp_path):
    p = tmp_path / "k22.g"
    p.write_text("n=4\n0-2 0-3 1-2 1-3\n")
    return str(p)


def test_no_args_prints_usage(capsys):
    code, out, err = run([], capsys)
    assert code == 2 and "usage" in (out + err).lower()


def test_unknown_flag_is_usage_error(capsys):
    code, _, err = run(["predict", "--pattern", "k:2,2", "--bogus"], capsys)
    assert code == 2 and "usage" in err.lower()


def test_bad_input_is_usage_error(capsys):
    code, _, err = run(["params", "density", "n=2; 0-0"], capsys)
    assert code == 2 and "self-loop" in err


def test_predict_k22_file(k22_file, capsys):
    code, out, _ = run(["predict", "--pattern", k22_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["tool"] == "randturan" and doc["version"] == __version__
    res = doc["result"]
    assert res["p_lower_threshold"] == "-2/3" and res["p_upper_threshold"] == "-1/3"
    assert "config" in doc and doc["config"]["seed"] == 0


def test_params_density(capsys):
    code, out, _ = run(["params", "density", "c:4"], capsys)
    assert code == 0 and json.loads(out)["result"]["m2"] == "3/2"


def test_params_semibounded(capsys):
    code, out, _ = run(["params", "semibounded", "k:2,2", "--r", "2"], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert "1/3" in json.dumps(res)


def test_construct_writes_graph_and_sidecar(tmp_path, capsys):
    out = tmp_path / "fm.g"
    code, _, _ = run(["construct", "fm", "n=3; 0-1 1-2x2 0-2x3", "--out", str(out)], capsys)
    assert code == 0
    g = parse_graph(out.read_text())
    assert (g.n, g.e) == (10, 15)
    side = json.loads((tmp_path / "fm.g.json").read_text())
    assert side["result"]["triple"]["v_star"] == 3
    code, text, _ = run(["construct", "frst", "--r", "2", "--s", "3", "--t", "1"], capsys)
    assert code == 0 and parse_graph(text).e == 9


def test_supersat_build(capsys):
    code, out, _ = run(["supersat", "build", "--pattern", "c:4", "--host", "k:4,4", "--delta", "1/2", "--audit"], capsys)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["family_size"] > 0 and res["dgood_recount_problems"] == [] and res["addable_embeddings"] == 0


def test_simulate_csv_and_budget(tmp_path, capsys):
    argv = ["simulate", "--pattern", "c:4", "--n", "10,12", "--p-exp", "-0.8,-0.5", "--reps", "2"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "n,p_exp,p,seed,ex_est,method,time_ms"
    assert len(lines) == 1 + 2 * 2 * 2
    code, _, _ = run(argv + ["--budget-ms", "0", "--out", str(tmp_path / "x.csv")], capsys)
    assert code == 3 and (tmp_path / "x.csv").exists()


def test_report_from_csv(tmp_path, capsys):
    csv = tmp_path / "r.csv"
    run(["simulate", "--pattern", "c:4", "--n", "10,14", "--p-exp", "-0.5", "--reps", "2", "--out", str(csv)], capsys)
    pred = tmp_path / "p.json"
    run(["predict", "--pattern", "c:4", "--out", str(pred)], capsys)
    code, out, _ = run(["report", "--csv", str(csv), "--prediction", str(pred)], capsys)
    assert code == 0
    assert json.loads(out)["result"]["series_by_p_exp"][0]["predicted_n_exponent"] == "4/3"


def test_verify_lemmas_small(capsys):
    code, out, _ = run(["verify-lemmas", "--max-vertices", "5"], capsys)
    assert code == 0
    assert out.count("PASS") == 12


def test_verify_lemmas_reports_counterexamples(capsys):
    code, out, _ = run(["verify-lemmas", "--max-vertices", "6", "--suite", "removal-recurrences"], capsys)
    assert code == 1
    assert "\nFAIL removal-recurrences checked=" in out
    assert "removing S-vertex" in out


DETERMINISM_CASES = [
    ["params", "density", "k:3,3"],
    ["params", "semibounded", "c:4", "--full-table"],
    ["construct", "fm", "n=3; 0-1 1-2 0-2"],
    ["construct", "frst", "--r", "2", "--s", "3", "--t", "2", "--format", "json"],
    ["supersat", "build", "--pattern", "c:4", "--host", "k:4,4", "--delta", "1/2", "--seed", "5"],
    ["simulate", "--pattern", "c:4", "--n", "10", "--p-exp", "-0.5,0", "--reps", "2", "--seed", "9"],
    ["predict", "--pattern", "fm:n=2; 0-1x2"],
    ["verify-lemmas", "--max-vertices", "4"],
]


@pytest.mark.parametrize("argv", DETERMINISM_CASES, ids=lambda a: " ".join(a[:2]))
def test_outputs_are_byte_identical(argv, tmp_path, capsys):
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert main(argv + ["--out", str(a)]) in (0, 1)
    assert main(argv + ["--out", str(b)]) in (0, 1)
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
