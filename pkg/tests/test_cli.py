import json
import math
import subprocess
import sys

import numpy as np
import pytest

from h3mag import cli


def run(*argv):
    return cli.main(list(argv))


def load_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_simulate_geodesic_from_rest(tmp_path):
    out = tmp_path / "rest.csv"
    assert run("simulate", "--system", "geodesic", "--state", "1,2,3,0,0,0",
               "--samples", "10", "--out", str(out)) == 0
    data = load_csv(out)
    assert data.shape[0] == 10
    assert np.all(data[:, 1:4] == data[0, 1:4])


def test_simulate_from_family_constants(tmp_path):
    out = tmp_path / "k1.csv"
    assert run("simulate", "--family", "TK1_1", "--variant", "printed", "--c1", "1", "--c2", "1",
               "--c3", "1", "--t1", "4", "--out", str(out)) == 0
    header = out.read_text().splitlines()[0].split(",")
    data = load_csv(out)
    assert np.all(np.diff(data[:, 0]) > 0)
    assert data[:, header.index("speed2_drift")].max() < 1e-8
    assert data[:, header.index("fi_drift")].max() < 1e-8


def test_simulate_json_and_seeded_state(tmp_path):
    out = tmp_path / "k4.json"
    assert run("simulate", "--system", "k4", "--seed", "9", "--format", "json",
               "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1 and doc["kind"] == "trajectory"
    assert doc["columns"][0] == "t" and len(doc["rows"]) == 101
    assert doc["diagnostics"]["steps"] > 0


def test_simulate_stdout(capsys):
    assert run("simulate", "--system", "k2", "--state", "0,0,0,1,0,0", "--samples", "3") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("t,x,y,z") and len(lines) == 4


@pytest.mark.parametrize("argv", [
    ["simulate", "--system", "k1", "--state", "1,2,3"],
    ["simulate", "--system", "k1", "--state", "a,b,c,d,e,f"],
    ["simulate", "--state", "0,0,0,1,0,0"],
    ["simulate", "--system", "k1", "--samples", "1"],
    ["simulate", "--system", "k1", "--method", "fixed-rk4", "--step", "0"],
    ["closed-form", "--family", "TK2", "--t0", "1", "--t1", "1"],
    ["closed-form"],
    ["simulate", "--system", "k9"],
])
def test_bad_arguments_exit_2(argv):
    assert run(*argv) == 2


def test_integration_failure_exit_3():
    assert run("simulate", "--system", "k1", "--state", "0,0,0,1,1,1", "--t1", "100",
               "--method", "fixed-rk4", "--step", "1e-5") == 3


def test_closed_form_tk1_3(tmp_path):
    out = tmp_path / "tk1_3.csv"
    assert run("closed-form", "--family", "TK1_3", "--variant", "printed", "--c",
               repr(math.sqrt(2)), "--c1", "1", "--c2", "1", "--c3", "1", "--out", str(out)) == 0
    data = load_csv(out)
    assert data.shape == (101, 4) and np.all(np.isfinite(data))
    # x(0) = lam (c1 + c2)/(lam c + 1) + c3 and y(0) = (c1 - c2)/s + c4
    assert data[0, 1:3] == pytest.approx([2 / (math.sqrt(2) + 1) + 1, 0.0])


def test_closed_form_domain_violation_exit_4():
    assert run("closed-form", "--family", "TK1_3", "--c", "0.5") == 4


def test_verify_corrected_all_exit_0(tmp_path):
    out = tmp_path / "v.json"
    assert run("verify", "--all", "--variant", "corrected", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert len(doc["reports"]) == 8
    assert all(r["classification"] == "PASS" for r in doc["reports"])


@pytest.mark.xfail(strict=True, reason="the published first K1 family fails the oracle")
def test_verify_tk1_1_printed_reports_pass(tmp_path):
    out = tmp_path / "v.json"
    run("verify", "--family", "TK1_1", "--variant", "printed", "--out", str(out))
    assert json.loads(out.read_text())["reports"][0]["classification"] == "PASS"


def test_verify_printed_failures_do_not_change_exit(tmp_path):
    assert run("verify", "--family", "TK2", "--variant", "printed") == 0


def test_verify_tk4_pole_exit_4(capsys):
    assert run("verify", "--family", "TK4", "--variant", "printed", "--t0", "0", "--t1", "2") == 4
    assert "pole" in capsys.readouterr().err


def test_verify_custom_constants(tmp_path):
    out = tmp_path / "v.json"
    assert run("verify", "--family", "TK3", "--c1", "1.5", "--c3", "0.2", "--out", str(out)) == 0
    rep = json.loads(out.read_text())["reports"][0]
    assert rep["constants"]["c1"] == 1.5


def test_selftest_and_ledger(tmp_path):
    st_out, lg_out = tmp_path / "s.json", tmp_path / "l.json"
    assert run("selftest", "--lambda", "1", "--samples", "20", "--out", str(st_out)) == 0
    doc = json.loads(st_out.read_text())
    assert doc["passed"] and doc["reports"][0]["failures"] == []
    assert run("ledger", "--out", str(lg_out)) == 0
    entries = json.loads(lg_out.read_text())["entries"]
    assert any(e["verdict"] == "out of scope" for e in entries)
    assert run("ledger", "--variant", "corrected", "--out", str(lg_out)) == 0
    assert json.loads(lg_out.read_text())["entries"] == []


def test_gallery_layout(tmp_path):
    assert run("gallery", "--out", str(tmp_path), "--samples", "21") == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    names = {d["name"] for d in manifest["datasets"]}
    assert {"tk1_1", "tk1_2", "tk1_3", "tk2", "tk3", "tk4"} <= names
    for d in manifest["datasets"]:
        assert load_csv(tmp_path / d["file"]).shape == (21, 4)
    assert run("gallery", "--out", str(tmp_path), "--samples", "1") == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "c.csv"
    cfg.write_text(json.dumps({"schema_version": 1, "family": "TK2", "lambda": 2.0,
                               "c1": 0.5, "samples": 5, "out": str(out)}))
    assert run("--config", str(cfg), "closed-form") == 0
    assert load_csv(out).shape == (5, 4)
    # command-line flags win
    assert run("--config", str(cfg), "closed-form", "--samples", "7") == 0
    assert load_csv(out).shape == (7, 4)


@pytest.mark.parametrize("doc", [
    {"family": "TK2", "colour": "red"},
    {"schema_version": 2, "family": "TK2"},
    ["TK2"],
])
def test_bad_config_exit_2(tmp_path, doc):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    assert run("--config", str(cfg), "closed-form") == 2


def test_missing_config_exit_2(tmp_path):
    assert run("--config", str(tmp_path / "nope.json"), "closed-form") == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "h3mag", "closed-form", "--family", "TK4",
                          "--c1", "1", "--samples", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "t,x,y,z"
