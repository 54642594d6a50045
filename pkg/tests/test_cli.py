import json
import subprocess
import sys

import pytest

from raystat.algebra import MP
from raystat.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, parse_config, run


def test_predict(tmp_path, capsys):
    assert run(["predict", "--l", "3", "--m", "7", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Av+(3) = 39/8" in out
    assert "7:S" in out and "7:I" in out and "7:R+" in out
    d = json.loads((tmp_path / "predict_m7_l3.json").read_text())
    assert d["av_plus"] == {"num": 39, "den": 8}


def test_predict_several_primes(tmp_path, capsys):
    assert run(["predict", "--S", "3,5", "--m", "1", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Av+(3) = 4/3" in out and "Av+(5) = 6/5" in out


def test_field(tmp_path, capsys):
    assert run(["field", "--D", "8", "--m", "7", "--l", "3", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Cl = trivial" in out
    assert "Cl(7) = Z/3" in out
    assert "eps = 1 + sqrt(2) (norm -1)" in out
    assert "nontrivial" in out


def test_field_imaginary(tmp_path, capsys):
    assert run(["field", "--D", "-23", "--m", "3", "--out", str(tmp_path)]) == EXIT_OK
    assert "Cl = Z/3" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["predict", "--l", "4"],
        ["predict", "--l", "2"],
        ["predict", "--S", "3,x"],
        ["predict", "--bogus"],
        ["nonsense"],
        ["survey", "--m", "7"],
        ["field"],
        ["field", "--D", "16"],
        ["geodesic", "--D", "-4"],
        ["predict", "--m", "0"],
        [],
    ],
)
def test_usage_errors(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)] if argv else argv) == EXIT_USAGE


def test_computation_failure_exit_code(tmp_path):
    # compare without a survey on disk
    assert run(["compare", "--X", "50", "--m", "7", "--out", str(tmp_path)]) == EXIT_FAILURE


def test_survey_compare_round_trip(tmp_path, capsys):
    args = ["--X", "300", "--m", "7", "--out", str(tmp_path)]
    assert run(["survey", *args]) == EXIT_OK
    d = tmp_path / "survey_pos_X300_m7_l3"
    first = (d / "records.jsonl").read_bytes()
    assert run(["compare", *args, "--csv"]) == EXIT_OK
    assert (d / "compare.json").exists() and (d / "compare.csv").exists()
    # rerunning reproduces the same outputs
    assert run(["survey", *args]) == EXIT_OK
    assert (d / "records.jsonl").read_bytes() == first
    assert "mean_ray_ell" in capsys.readouterr().out


def test_geodesic(tmp_path, capsys):
    assert run(["geodesic", "--D", "8", "--samples", "5", "--out", str(tmp_path)]) == EXIT_OK
    rec = json.loads((tmp_path / "geodesics_D8.jsonl").read_text().splitlines()[0])
    assert len(rec["samples"]) == 5
    assert run(["geodesic", "--X", "30", "--samples", "0", "--out", str(tmp_path)]) == EXIT_OK
    assert len((tmp_path / "geodesics_X30.jsonl").read_text().splitlines()) >= 9


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("RAYSTAT_OUT", str(tmp_path / "env"))
    assert parse_config(["predict"]).out == tmp_path / "env"
    assert run(["predict", "--m", "3"]) == EXIT_OK
    assert (tmp_path / "env" / "predict_m3_l3.json").exists()
    assert parse_config(["predict", "--out", "x"]).out.name == "x"


def test_precision_is_restored(tmp_path):
    before = MP.dps
    assert run(["predict", "--m", "1", "--precision", "30", "--out", str(tmp_path)]) == EXIT_OK
    assert MP.dps == before


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "raystat.cli", "predict", "--m", "3", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "3/2" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "raystat.cli", "predict", "--l", "4"], capture_output=True, text=True)
    assert proc.returncode == 1
