import json
import os
import re
import subprocess
import sys

import numpy as np
import pytest

from tripwell.cli import main

EX1 = {"kind": "polynomial-triple-well", "wells": [-1.0, 1.0 / 3.0, 1.0]}
EX2 = {"kind": "polynomial-triple-well", "wells": [-1.0, 0.5, 1.0]}


def run_cli(*args, env=None):
    environ = dict(os.environ)
    if env:
        environ.update(env)
    return subprocess.run([sys.executable, "-m", "tripwell.cli", *args],
                          capture_output=True, text=True, env=environ)


def strip_wall_time(text):
    return re.sub(r'"wall_time_s": [-0-9.e+]+', '"wall_time_s": 0', text)


@pytest.fixture()
def spec_files(tmp_path):
    p1 = tmp_path / "ex1.json"
    p2 = tmp_path / "ex2.json"
    p1.write_text(json.dumps(EX1))
    p2.write_text(json.dumps(EX2))
    return str(p1), str(p2)


def test_constants_command(spec_files):
    p1, _ = spec_files
    r = run_cli("constants", "--potential", p1)
    assert r.returncode == 0
    out = json.loads(r.stdout)
    assert abs(out["constants"]["A0"] - 0.718) <= 1e-3
    assert out["manifest"]["command"] == "constants"
    assert len(out["manifest"]["potential_digest"]) == 64


def test_check_hypotheses_command(spec_files):
    _, p2 = spec_files
    r = run_cli("check-hypotheses", "--potential", p2)
    assert r.returncode == 0
    rep = json.loads(r.stdout)["hypotheses"]
    assert rep["H6"]["status"] == "holds"
    assert rep["H7"]["status"] == "fails"
    assert abs(rep["H7"]["worst_y"] - 0.585) <= 0.02
    assert abs(rep["H8"]["worst_y"] - 0.204) <= 0.02


def test_construct_energy_analyze_roundtrip(spec_files, tmp_path):
    p1, _ = spec_files
    prof = str(tmp_path / "profile.json")
    r = run_cli("construct", "--potential", p1, "--eps", "0.08",
                "--kind", "two-well", "--out", prof)
    assert r.returncode == 0
    r = run_cli("energy", "--profile", prof, "--potential", p1)
    assert r.returncode == 0
    total = json.loads(r.stdout)["energy"]["total"]
    assert 0.4 < total < 0.7
    hist_csv = str(tmp_path / "hist.csv")
    r = run_cli("analyze", "--profile", prof, "--potential", p1,
                "--eta", "0.2", "--hist-csv", hist_csv)
    assert r.returncode == 0
    rep = json.loads(r.stdout)["measure_report"]
    assert abs(rep["lambda"][1] - 0.75) < 0.05
    header = open(hist_csv).readline().strip()
    assert header == "bin_lo,bin_hi,mass"


def test_competitor_construct_requires_yhat(spec_files, tmp_path):
    _, p2 = spec_files
    r = run_cli("construct", "--potential", p2, "--eps", "0.06",
                "--kind", "h7", "--out", str(tmp_path / "x.json"))
    assert r.returncode == 1
    r = run_cli("construct", "--potential", p2, "--eps", "0.06",
                "--kind", "h7", "--yhat", "0.585", "--out", str(tmp_path / "x.json"))
    assert r.returncode == 0


def test_minimize_command_roundtrip(spec_files, tmp_path):
    p1, _ = spec_files
    out = str(tmp_path / "min.json")
    r = run_cli("minimize", "--potential", p1, "--eps", "0.1",
                "--starts", "2", "--max-iters", "25", "--grid-n", "2001",
                "--out", out)
    assert r.returncode == 0
    payload = json.loads(r.stdout)["minimize"]
    assert payload["start_kind"] == "two-well"
    assert payload["per_start"]["two-well"] < payload["per_start"]["three-well"]
    # the stored profile is accepted unchanged by the other commands
    r = run_cli("energy", "--profile", out, "--potential", p1)
    assert r.returncode == 0
    assert json.loads(r.stdout)["energy"]["total"] == pytest.approx(
        payload["value"], rel=1e-12)


def test_sweep_csv_deterministic(spec_files, tmp_path):
    p1, _ = spec_files
    outs = []
    for name in ("a.csv", "b.csv"):
        out = str(tmp_path / name)
        r = run_cli("sweep", "--potential", p1, "--eps", "0.1",
                    "--starts", "2", "--max-iters", "20", "--seed", "5",
                    "--grid-n", "2001", "--out", out)
        assert r.returncode == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]
    header = outs[0].decode().split("\n")[0]
    assert header == "eps,best_value,lambda1,lambda2,lambda3,layersA,layersB,start_kind"


def test_seed_env_override(spec_files, tmp_path):
    p1, _ = spec_files
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    r = run_cli("sweep", "--potential", p1, "--eps", "0.1", "--starts", "3",
                "--max-iters", "10", "--seed", "1", "--grid-n", "2001", "--out", a,
                env={"TRIPWELL_SEED": "9"})
    assert r.returncode == 0
    r = run_cli("sweep", "--potential", p1, "--eps", "0.1", "--starts", "3",
                "--max-iters", "10", "--seed", "9", "--grid-n", "2001", "--out", b)
    assert r.returncode == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_json_output_deterministic(spec_files):
    p1, _ = spec_files
    a = run_cli("check-hypotheses", "--potential", p1).stdout
    b = run_cli("check-hypotheses", "--potential", p1).stdout
    assert strip_wall_time(a) == strip_wall_time(b)


def test_exit_codes(spec_files, tmp_path):
    p1, _ = spec_files
    assert run_cli("no-such-command").returncode == 1
    assert run_cli("constants").returncode == 1          # missing flag
    r = run_cli("construct", "--potential", p1, "--eps", "0.9",
                "--kind", "two-well", "--out", str(tmp_path / "x.json"))
    assert r.returncode == 2
    err = json.loads(r.stderr)
    assert err["error"]["type"] == "ConstructionError"
    r = run_cli("constants", "--potential", str(tmp_path / "missing.json"))
    assert r.returncode == 2


def test_digest_tracks_file_bytes(spec_files, tmp_path):
    p1, _ = spec_files
    d1 = json.loads(run_cli("constants", "--potential", p1).stdout)["manifest"]["potential_digest"]
    other = tmp_path / "copy.json"
    other.write_text(open(p1).read())
    d2 = json.loads(run_cli("constants", "--potential", str(other)).stdout)["manifest"]["potential_digest"]
    assert d1 == d2
    other.write_text(json.dumps(EX2))
    d3 = json.loads(run_cli("constants", "--potential", str(other)).stdout)["manifest"]["potential_digest"]
    assert d3 != d1


def test_paper_examples_summary(tmp_path):
    out = str(tmp_path / "summary.json")
    r = run_cli("paper-examples", "--out", out)
    assert r.returncode == 0
    summary = json.loads(open(out).read())["summary"]
    c1 = summary["example-1"]["constants"]
    assert abs(c1["A0"] - 0.718) <= 1e-3
    assert summary["example-1"]["hypotheses"]["H7"]["status"] == "holds"
    comp = summary["example-2"]["competitors"]
    assert comp["h7"]["beats_line_in_the_limit"]
    assert comp["h8"]["beats_line_in_the_limit"]
    ladder = summary["example-1"]["two_well_ladder"]
    assert all(0.9 * e["limit"] <= e["I_eps"] <= 1.25 * e["limit"] for e in ladder)


def test_main_in_process_usage_error():
    assert main(["bogus"]) == 1


def test_l0_split_intervals(spec_files, tmp_path):
    p1, _ = spec_files
    prof = str(tmp_path / "left.json")
    r = run_cli("construct", "--potential", p1, "--eps", "0.05",
                "--kind", "two-well", "--l0", "0.6", "--out", prof)
    assert r.returncode == 0
    data = json.loads(open(prof).read())
    assert data["nodes"][0] == 0.0
    assert abs(data["nodes"][-1] - 0.6) < 1e-12
    prof2 = str(tmp_path / "right.json")
    r = run_cli("construct", "--potential", p1, "--eps", "0.05",
                "--kind", "three-well", "--l0", "0.6", "--out", prof2)
    assert r.returncode == 0
    data = json.loads(open(prof2).read())
    assert abs(data["nodes"][0] - 0.6) < 1e-12
    assert data["nodes"][-1] == 1.0
