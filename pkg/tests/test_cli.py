import argparse
import json

import pytest

from sixdma_isac.cli import main, parse_range
from sixdma_isac.runner import CSV_HEADER, read_results


def test_parse_range():
    assert parse_range("4..16:4", int) == [4, 8, 12, 16]
    assert parse_range("4..6", int) == [4, 5, 6]
    assert parse_range("-10..40:25") == [-10.0, 15.0, 40.0]
    assert parse_range("1,3,9", int) == [1, 3, 9]
    with pytest.raises(argparse.ArgumentTypeError):
        parse_range("5..1")


def _small_scenario(tmp_path):
    path = tmp_path / "scen.json"
    path.write_text(json.dumps({"pso": {"M": 10, "T_max": 15}, "pbf": {"restarts": 1}, "ao": {"rounds": 3}}))
    return str(path)


def test_run_writes_csv_and_sidecars(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["run", "--scenario", _small_scenario(tmp_path), "--scheme", "orient-pbf", "--seed", "5",
                 "--out", str(out), "--verbose", "--plot"])
    assert code == 0
    assert out.read_text().splitlines()[0] == CSV_HEADER
    assert read_results(out)[0]["seed"] == 5
    assert (tmp_path / "run.trace.jsonl").stat().st_size > 0
    assert (tmp_path / "run.png").stat().st_size > 0
    assert "orient-pbf" in capsys.readouterr().out


def test_sweep_elements_cli(tmp_path):
    out = tmp_path / "e.csv"
    code = main(["sweep-elements", "--scenario", _small_scenario(tmp_path), "--nx", "2,3", "--seeds", "1",
                 "--schemes", "pbf-only,6d-pbf-r1", "--out", str(out), "--plot"])
    assert code == 0
    assert len(read_results(out)) == 4
    assert (tmp_path / "e.png").exists() and (tmp_path / "e_poses.png").exists()


def test_sweep_gamma_cli(tmp_path):
    out = tmp_path / "g.csv"
    code = main(["sweep-gamma", "--scenario", _small_scenario(tmp_path), "--gamma", "0..30:15", "--nx", "2",
                 "--seeds", "1", "--schemes", "pbf-only", "--out", str(out), "--plot"])
    assert code == 0
    rows = read_results(out)
    assert [r["Gamma0_dB"] for r in rows] == [0.0, 15.0, 30.0]
    assert (tmp_path / "g.png").exists()


def test_scenario_command_round_trips(tmp_path):
    out = tmp_path / "default.json"
    assert main(["scenario", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["arrays"]["N_t"] == 32


def test_errors_return_code_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"arrays": {"N_q": 1}}))
    assert main(["run", "--scenario", str(bad), "--scheme", "pbf-only", "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["run", "--scheme", "nope", "--out", str(tmp_path / "x.csv")]) == 2
    assert "error:" in capsys.readouterr().err
