import json
import math
import os

import numpy as np
import pytest

from wqed import cli
from wqed.errors import MalformedValue, MissingCommand, UnknownKey
from wqed.model import Direction
from wqed.sweep import Engine, IsolationMap


def test_fig4_config():
    cfg = cli.parse_config(["spectrum", "--phi", "1.5707963", "--x0", "2"])
    assert cfg.command == "spectrum"
    assert cfg.params.base.phi == 1.5707963 and cfg.params.base.x0 == 2.0
    assert cfg.params.base.lambda_mag == 0.1 and cfg.params.base.f == 0.3
    assert cfg.delta.steps == 801 and cfg.engine is Engine.SOLVER


def test_flags_override_file():
    text = "# benchmark\n[run]\nx0 = 2\nphi = 0.3\ndelta-steps = 11\n"
    cfg = cli.parse_config(["map", "--phi=0.5"], file=text)
    assert cfg.params.base.x0 == 2.0
    assert cfg.params.base.phi == 0.5
    assert cfg.delta.steps == 11


def test_config_flag(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("lambda = 0.2\ndirection = right\nengine = analytic\n")
    cfg = cli.parse_config(["features", "--config", str(path)])
    assert cfg.params.base.lambda_mag == 0.2
    assert cfg.direction is Direction.RIGHT and cfg.engine is Engine.ANALYTIC


@pytest.mark.parametrize(
    "argv, error, token",
    [
        ([], MissingCommand, None),
        (["plot"], MissingCommand, "plot"),
        (["map", "--delta-steps", "1"], MalformedValue, "1"),
        (["map", "--phi", "abc"], MalformedValue, "abc"),
        (["map", "--phi", "nan"], MalformedValue, "nan"),
        (["map", "--bogus", "1"], UnknownKey, "--bogus"),
        (["map", "--delta-min", "0.2", "--delta-max", "0.1"], MalformedValue, None),
        (["map", "--v-g", "0"], MalformedValue, None),
        (["map", "--format", "xml"], MalformedValue, "xml"),
    ],
)
def test_usage_errors(argv, error, token):
    with pytest.raises(error) as info:
        cli.parse_config(argv)
    if token is not None:
        assert info.value.token == token


def test_file_errors():
    with pytest.raises(UnknownKey):
        cli.parse_file("colour = red\n")
    with pytest.raises(MalformedValue):
        cli.parse_file("x0 2\n")


def test_exit_codes(tmp_path, capsys):
    assert cli.main([]) == 2
    assert cli.main(["map", "--delta-steps", "1"]) == 2
    missing = tmp_path / "nope" / "out.csv"
    assert cli.main(["spectrum", "--delta-steps", "3", "--output", str(missing)]) == 1
    assert not missing.parent.exists()
    assert cli.main(["spectrum", "--engine", "analytic", "--omega-e", "1.1", "--delta-steps", "3"]) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 4


def test_failed_write_leaves_no_partial_file(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"

    def broken(*args, **kwargs):
        raise OSError(28, "No space left on device")

    monkeypatch.setattr(os, "replace", broken)
    assert cli.main(["spectrum", "--delta-steps", "3", "--output", str(target)]) == 1
    assert list(tmp_path.iterdir()) == []


def test_spectrum_csv_format(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["spectrum", "--x0", "2", "--phi", "1.5707963", "--delta-steps", "5", "--output", str(out)]) == 0
    data = out.read_bytes()
    lines = data.decode().split("\n")
    assert lines[0] == "delta,E,T_LR,R_LR,T_RL,R_RL,loss_LR,loss_RL"
    assert lines[-1] == "" and len(lines) == 7
    assert b"\r" not in data and all(line == line.rstrip() for line in lines)
    first = lines[1].split(",")
    assert first[0] == "-4.000000000000e-01"
    values = np.loadtxt(out, delimiter=",", skiprows=1)
    assert values.shape == (5, 8)


def test_output_is_deterministic(tmp_path):
    argv = ["map", "--x0", "2", "--gamma-a", "0.05", "--gamma-e", "0.05", "--delta-steps", "31", "--phi-steps", "13"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--output", str(a)]) == 0
    os.environ["WQED_THREADS"] = "1"
    try:
        assert cli.main(argv + ["--output", str(b)]) == 0
    finally:
        del os.environ["WQED_THREADS"]
    assert a.read_bytes() == b.read_bytes()


def test_map_csv_marks_saturated():
    imap = IsolationMap(
        np.array([-0.1, 0.1]),
        np.array([0.0]),
        np.array([[310.0, 1.5]]),
        np.array([[True, False]]),
    )
    assert cli.map_csv(imap) == (
        "phi\\delta,-1.000000000000e-01,1.000000000000e-01\n"
        "0.000000000000e+00,3.100000000000e+02*,1.500000000000e+00\n"
    )


def test_json_outputs(tmp_path):
    out = tmp_path / "m.json"
    assert cli.main(["map", "--delta-steps", "3", "--phi-steps", "2", "--format", "json", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["values_db"]) == 2 and len(doc["values_db"][0]) == 3
    assert doc["flags"][0][0] in ("normal", "saturated_zero")
    out = tmp_path / "s.json"
    assert cli.main(["spectrum", "--engine", "analytic", "--gamma-a", "0.1", "--gamma-e", "0.1",
                     "--delta-steps", "3", "--format", "json", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["rows"][0][3] is None


def test_features_command(tmp_path):
    out = tmp_path / "f.json"
    assert cli.main(["features", "--format", "json", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert sorted(round(z["E"], 8) for z in doc["zeros"] if z["direction"] == "left") == [0.9, 1.1]
    assert any(abs(u["E"] - 0.907692307692) < 1e-6 for u in doc["unit_peaks"])


def test_validate_command(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert cli.main(["validate", "--x0", "2", "--delta-steps", "5", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["max_deviation"]["analytic"] < 1e-11
    assert "PASS analytic" in capsys.readouterr().err


def test_validate_failure_exit_code(monkeypatch):
    monkeypatch.setitem(cli.oracle.validate.DEFAULT_TOLERANCES, "regularized", 1e-14)
    assert cli.main(["validate", "--delta-steps", "3", "--output", os.devnull]) == 1


def test_wavepacket_command(tmp_path):
    out = tmp_path / "w.json"
    assert cli.main(["wavepacket", "--x0", "2", "--k0", "0.9", "--format", "json", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["T_num"] == pytest.approx(doc["T_solver"], abs=0.02)
    assert math.isclose(doc["T_num"] + doc["R_num"] + doc["absorbed"], 1.0, abs_tol=1e-6)
