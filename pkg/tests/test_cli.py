import csv
import io
import json
import math

import pytest

from gydet.cli import dumps, format_float, main, to_csv


def run(*argv, env=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


CONST1 = '{"type":"constant","omega2":1}'


def test_compute_dirichlet_example():
    code, out, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--bc", "dirichlet")
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["value", "method", "bc", "omega_ref", "diagnostics", "paper_anchor"]
    assert list(doc["diagnostics"]) == ["wronskian_drift", "zero_mode_residual", "steps"]
    assert doc["value"] == pytest.approx(0.841470985, abs=1e-9)
    assert doc["omega_ref"] is None and doc["method"] == "gy"


def test_compute_periodic_anchor():
    code, out, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--bc", "periodic",
                       "--omega-ref", "1")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(1.0, abs=1e-9)


def test_compute_all_routes():
    code, out, _ = run("compute", "--expr", "1+0.5*cos(2*pi*t)", "--ta", "0", "--tb", "1", "--bc", "periodic",
                       "--method", "all")
    assert code == 0
    doc = json.loads(out)
    assert [r["method"] for r in doc["results"]] == ["gy", "homotopy", "fd_oracle"]
    assert set(doc["deviations"]) == {"gy-homotopy", "gy-fd_oracle", "homotopy-fd_oracle"}
    assert doc["max_deviation"] < 1e-4


def test_output_is_deterministic():
    argv = ("compute", "--expr", "1+0.5*cos(pi*t)", "--ta", "0", "--tb", "2", "--bc", "antiperiodic")
    assert run(*argv)[1] == run(*argv)[1]


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(float("nan")) is None
    assert dumps({"b": 1, "a": [0.5, None, True]}) == '{\n  "b": 1,\n  "a": [\n    0.5,\n    null,\n    true\n  ]\n}\n'


def test_csv_output():
    code, out, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--out", "csv")
    assert code == 0
    assert out.endswith("\r\n")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "value" and float(rows[1][0]) == pytest.approx(math.sin(1.0), rel=1e-9)
    text = to_csv(["a", "b"], [['x,"y"', 1.5]])
    assert text == 'a,b\r\n"x,""y""",1.5\r\n'


def test_profile_from_file(tmp_path):
    f = tmp_path / "p.json"
    f.write_text(CONST1)
    code, out, _ = run("compute", "--profile", f"@{f}", "--ta", "0", "--tb", "1")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(math.sin(1.0), rel=1e-9)
    assert run("compute", "--profile", f"@{tmp_path / 'missing.json'}", "--ta", "0", "--tb", "1")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("compute", "--profile", "{bad", "--ta", "0", "--tb", "1"),
        ("compute", "--profile", CONST1, "--ta", "1", "--tb", "0"),
        ("compute", "--profile", CONST1, "--ta", "0"),
        ("compute", "--ta", "0", "--tb", "1"),
        ("compute", "--profile", CONST1, "--expr", "1", "--ta", "0", "--tb", "1"),
        ("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--method", "fd"),
        ("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--bc", "robin"),
        ("compute", "--profile", CONST1, "--ta", "0", "--tb", "6.283185307179586", "--bc", "periodic",
         "--omega-ref", "1"),
        ("compute", "--bogus"),
        ("instanton", "--m", "0"),
        ("instanton", "--period", "3"),
        ("instanton", "--m", "0.5", "--period", "8"),
        ("green", "--expr", "0", "--ta", "0", "--tb", "1", "--t", "1.5", "--tp", "0.5"),
    ],
)
def test_config_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2
    assert out == ""


def test_zero_mode_exit_4():
    code, out, err = run("compute", "--profile", '{"type":"instanton","omega":1,"a":1,"m":0.9}')
    assert code == 4
    assert "primed" in err and out == ""
    code, _, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "1", "--method", "homotopy",
                     "--n-g", "16", "--bc", "dirichlet")
    assert code == 0


def test_homotopy_zero_mode_crossing_exit_4():
    code, _, err = run("compute", "--expr", "16", "--ta", "0", "--tb", "1", "--method", "homotopy")
    assert code == 4 and "g=" in err


def test_numerical_failure_exit_3():
    code, _, err = run("compute", "--expr", "1/(t-0.5)^2", "--ta", "0", "--tb", "1")
    assert code == 3


def test_env_tolerance(monkeypatch):
    monkeypatch.setenv("GYDET_TOL", "1e-6")
    _, loose, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "5")
    monkeypatch.setenv("GYDET_TOL", "1e-12")
    _, tight, _ = run("compute", "--profile", CONST1, "--ta", "0", "--tb", "5")
    assert json.loads(loose)["diagnostics"]["steps"] < json.loads(tight)["diagnostics"]["steps"]
    monkeypatch.setenv("GYDET_TOL", "abc")
    assert run("compute", "--profile", CONST1, "--ta", "0", "--tb", "5")[0] == 2


def test_instanton_report():
    code, out, _ = run("instanton", "--period", "20")
    assert code == 0
    doc = json.loads(out)
    assert doc["ratio"] == pytest.approx(1 / 12, rel=1e-2)
    assert doc["primed_det"] == pytest.approx(2.0217e7, rel=2e-2)
    assert doc["numerical"]["relative_deviation"] < 1e-4
    code, out, _ = run("instanton", "--m", "0.5")
    assert json.loads(out)["geometry"]["T"] == pytest.approx(6.4227, abs=1e-4)


def test_instanton_fd_check():
    code, out, _ = run("instanton", "--period", "12", "--check-N", "3000")
    assert code == 0
    assert json.loads(out)["fd_oracle"]["relative_deviation"] < 1e-3


def test_sweep_instanton_monotone():
    code, out, _ = run("sweep", "--param", "m", "--from", "0.5", "--to", "0.99", "--steps", "10")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    dets = [float(r["primed_det"]) for r in rows]
    assert all(b > a for a, b in zip(dets, dets[1:]))


def test_sweep_zero_crossing():
    steps = 41
    code, out, _ = run("sweep", "--param", "omega2", "--from", "0", "--to", "4", "--steps", str(steps),
                       "--ta", "0", "--tb", str(math.pi))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    x = [float(r["omega2"]) for r in rows]
    v = [float(r["value"]) for r in rows]
    assert x == sorted(x)
    i = next(k for k in range(len(v) - 1) if v[k] > 0 >= v[k + 1] or v[k] >= 0 > v[k + 1])
    step = 4 / (steps - 1)
    assert abs(x[i] - 1.0) <= step + 1e-12 and abs(x[i + 1] - 1.0) <= step + 1e-12


def test_sweep_single_row_and_failures():
    code, out, _ = run("sweep", "--param", "omega2", "--from", "2", "--to", "3", "--steps", "1",
                       "--ta", "0", "--tb", "1")
    assert code == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 1
    code, out, _ = run("sweep", "--param", "T", "--from", "3", "--to", "9", "--steps", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["status"] for r in rows] == ["failed", "ok", "ok"]
    assert "unreachable" in rows[0]["error"]


def test_sweep_parallel_matches_serial():
    argv = ["sweep", "--param", "omega_ref", "--from", "0.5", "--to", "1.5", "--steps", "4",
            "--expr", "1+0.5*cos(2*pi*t)", "--ta", "0", "--tb", "1", "--bc", "periodic"]
    serial = run(*argv)[1]
    parallel = run(*argv, "--jobs", "2")[1]
    assert serial == parallel


def test_green_examples():
    code, out, _ = run("green", "--expr", "0", "--ta", "0", "--tb", "1", "--t", "0.5", "--tp", "0.5")
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.25, abs=1e-14)
    code, out, _ = run("green", "--profile", '{"type":"constant","omega2":1.21}', "--ta", "0", "--tb", "1",
                       "--t", "0.3", "--tp", "0.7", "--bc", "periodic")
    d = json.loads(out)["diagnostics"]
    assert d["jump_residual"] < 1e-7 and d["boundary_residual"] < 1e-8


def test_oracle_command():
    code, out, _ = run("oracle", "--profile", '{"type":"instanton","omega":1,"a":1,"m":0.99}', "--primed",
                       "--N", "4000", "--ref-omega2", "-1", "--eigenvalues", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.0837, rel=1e-2)
    assert abs(doc["lowest_eigenvalues"][0]) < 1e-5
    code, out, _ = run("oracle", "--profile", CONST1, "--ta", "0", "--tb", "1", "--N", "2000")
    assert json.loads(out)["value"] == pytest.approx(math.sin(1.0), abs=3e-7)
