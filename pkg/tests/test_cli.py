import csv
import io
import json
import math
import subprocess
import sys

import pytest

from scatterwalk.cli import main, parse_phi
from scatterwalk.graph import bipartite_graph


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("text,value", [("pi", math.pi), ("pi/2", math.pi / 2), ("3pi/2", 1.5 * math.pi),
                                        ("0.25", 0.25), ("-pi/4", -math.pi / 4), ("2*pi", 2 * math.pi)])
def test_parse_phi(text, value):
    assert parse_phi(text) == pytest.approx(value)


def test_parse_phi_rejects_garbage():
    with pytest.raises(Exception):
        parse_phi("tau")


def test_verify_circuit(capsys):
    code, out = run(capsys, "verify-circuit", "--family", "complete", "--n", "5", "--v", "1",
                    "--phi", "pi", "--steps", "20")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert report["oracle_calls"] == 40 and report["max_abs_dev"] <= 1e-12
    assert {"family", "params", "steps", "max_abs_dev", "oracle_calls"} <= set(report)


@pytest.mark.parametrize("argv", [["--family", "complete", "--n", "7", "--v", "2"],
                                  ["--family", "bipartite", "--n1", "3", "--n2", "5", "--v1", "1", "--v2", "2"],
                                  ["--family", "mpartite", "--m-sets", "4", "--n", "3"]])
def test_verify_collapse(capsys, argv):
    code, out = run(capsys, "verify-collapse", "--phi", "pi/2", "--steps", "30", *argv)
    assert code == 0 and json.loads(out)["passed"]


def test_simulate_csv(capsys):
    code, out = run(capsys, "simulate", "--n", "256", "--fast", "--steps", "25", "--out", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 26
    assert max(float(r["p_incident"]) for r in rows) >= 0.999


def test_simulate_json(capsys):
    code, out = run(capsys, "simulate", "--family", "bipartite", "--n1", "8", "--n2", "8", "--steps", "10",
                    "--init", "entering2", "--criterion", "entering", "--cost-model", "walk-plus-measure")
    report = json.loads(out)
    assert code == 0
    assert report["criterion"] == "entering" and report["cost_model"] == "walk-plus-measure"
    assert len(report["trace"]["p_entering"]) == 11


def test_sweep_csv_and_file_output(capsys, tmp_path):
    target = tmp_path / "grid.csv"
    code, _ = run(capsys, "sweep", "--n", "32", "--points", "8", "--steps", "10", "--out", "csv",
                  "--output", str(target))
    lines = target.read_text().splitlines()
    assert code == 0
    assert lines[0] == "phi,m,p_incident,p_entering,p_leaving" and len(lines) == 1 + 8 * 11


def test_sweep_json_curve(capsys):
    code, out = run(capsys, "sweep", "--n", "64", "--points", "16")
    data = json.loads(out)
    assert code == 0 and len(data["n_bar"]) == 16
    assert data["blind_average"] == 64 and data["memory_average"] == pytest.approx(65 / 2)


def test_compare_classical(capsys):
    code, out = run(capsys, "compare-classical", "--n", "100", "--trials", "20000", "--seed", "7", "--out", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["variant", "N", "v", "closed_form_avg", "mc_avg", "mc_stderr", "seed"]
    assert {r["variant"] for r in rows} == {"blind", "memory"} and rows[0]["seed"] == "7"
    _, again = run(capsys, "compare-classical", "--n", "100", "--trials", "20000", "--seed", "7", "--out", "csv")
    assert again == out


def test_graph_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(bipartite_graph(3, 4, 1, 1).to_json())
    code, out = run(capsys, "verify-circuit", "--graph-file", str(path), "--steps", "5")
    assert code == 0 and json.loads(out)["family"] == "bipartite"


def test_invalid_input_exit_code(capsys):
    code = main(["simulate", "--n", "1"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_verification_failure_exit_code(capsys, monkeypatch):
    import scatterwalk.cli as cli
    monkeypatch.setattr(cli, "verify_circuit", lambda *a, **k: {"passed": False, "steps": 1})
    assert main(["verify-circuit", "--n", "4"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scatterwalk", "verify-circuit", "--n", "4", "--steps", "3",
                           "--out", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("family,")
