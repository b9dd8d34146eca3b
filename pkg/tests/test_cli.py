import csv
import json

import pytest

from ellislab.cli import main


def test_simulate_rotation_rows(tmp_path):
    assert main(["simulate", "--flow", "rotation", "--alpha-preset", "golden", "--horizon", "100", "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "orbit.csv")))
    assert rows[0] == ["t", "coord1", "coord2", "tag"]
    assert len(rows) - 1 == 101


def test_semigroup_annulus_tags(tmp_path):
    code = main(["semigroup", "--flow", "annulus", "--epsilon", "0.05", "--horizon", "10000", "--resolution", "8", "--out", str(tmp_path)])
    assert code == 0
    doc = json.load(open(tmp_path / "semigroup.json"))
    elements = doc["result"]["elements"]
    assert all(e["symbolic_distance"] < 0.05 for e in elements)
    assert {e["tag"] for e in elements} >= {"Power", "H1", "H2"}
    assert (tmp_path / "distances.csv").exists()
    assert (tmp_path / "identity_distance.csv").exists()
    assert "workers" not in doc["config"]


def test_semigroup_second_level(tmp_path):
    code = main(["semigroup", "--flow", "rotation", "--epsilon", "0.1", "--horizon", "500", "--second-level", "--out", str(tmp_path)])
    assert code == 0
    doc = json.load(open(tmp_path / "semigroup.json"))
    assert doc["result"]["second"]["count"] == doc["result"]["count"]


def test_detect_proximal_writes_return_set(tmp_path, capsys):
    code = main(["detect", "--flow", "annulus", "--property", "proximal", "--point", "1.5,0", "--point", "1.2,0",
                 "--epsilon", "0.01", "--horizon", "100", "--out", str(tmp_path)])
    assert code == 0
    assert capsys.readouterr().out.startswith("proximal: holds")
    doc = json.load(open(tmp_path / "verdict.json"))
    assert doc["result"]["verdict"]["outcome"] == "holds"
    assert len(list(csv.reader(open(tmp_path / "return_set.csv")))) == 202


def test_detect_sensitive_torus(tmp_path, capsys):
    code = main(["detect", "--flow", "torus_circle", "--property", "sensitive", "--point", "torus,0.1,0.2",
                 "--epsilon", "0.25", "--delta", "0.1", "--delta", "0.01", "--delta", "0.001", "--horizon", "1000", "--out", str(tmp_path)])
    assert code == 0
    assert capsys.readouterr().out.startswith("sensitive: holds")


def test_theorems_select_and_report(tmp_path, capsys):
    assert main(["theorems", "--select", "T-iso", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["report", str(tmp_path / "theorems.json")]) == 0
    out = capsys.readouterr().out
    assert "T-iso" in out and "pass 1" in out
    assert (tmp_path / "theorems.txt").read_text() == out


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ELLISLAB_OUT", str(tmp_path / "env"))
    assert main(["simulate", "--flow", "identity", "--horizon", "3"]) == 0
    assert (tmp_path / "env" / "orbit.csv").exists()


@pytest.mark.parametrize("argv", [
    ["theorems", "--select", "T-nope"],
    ["simulate", "--flow", "rotation", "--alpha", "0.5"],
    ["detect", "--flow", "rotation", "--property", "proximal", "--point", "0.1"],
    ["report", "/nonexistent.json"],
])
def test_errors_exit_two(argv, tmp_path, capsys):
    assert main(argv + (["--out", str(tmp_path)] if argv[0] != "report" else [])) == 2
    assert capsys.readouterr().err.startswith("error: ")


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("detect:\n  epsilons: [-1]\n")
    assert main(["theorems", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "line 2" in capsys.readouterr().err
