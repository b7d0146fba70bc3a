from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from killinglab.cli import ScenarioError, load_scenario, main, run_scenario
from killinglab.experiments import EXPERIMENTS

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _write(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_g6_scenario(tmp_path):
    assert main(["run", str(SCENARIOS / "flat_g6.yaml"), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] and report["summary"]["tag"] == "no-constant-length-field"
    assert (tmp_path / "samples.csv").read_text().splitlines()[0]


def test_sphere_flow_report(tmp_path):
    assert main(["run", str(SCENARIOS / "sphere_flow.yaml"), "--out", str(tmp_path), "--samples", "20"]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["summary"]["L_over_l"] == "6"
    assert report["scenario"]["samples_override"] == 20


def test_malformed_and_unknown(tmp_path):
    bad = _write(tmp_path, "experiment: [unclosed\n")
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 2
    unknown = _write(tmp_path, "experiment: frobnicate\n", "u.yaml")
    assert main(["run", str(unknown), "--out", str(tmp_path)]) == 2
    extra = _write(tmp_path, "experiment: flat-classify\nparams: {group: G6}\ncolour: red\n", "e.yaml")
    with pytest.raises(ScenarioError):
        load_scenario(extra)
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert main(["bogus"]) == 2


def test_bad_params_exit_2(tmp_path):
    p = _write(tmp_path, "experiment: sphere-flow\nparams: {n: 2, q: lots}\n")
    assert main(["run", str(p), "--out", str(tmp_path)]) == 2


def test_failing_check_exits_1(tmp_path):
    p = _write(tmp_path, "experiment: flat-classify\nparams: {group: G6, expect: quasiregular}\n")
    assert main(["run", str(p), "--out", str(tmp_path)]) == 1
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is False


def test_json_scenario(tmp_path):
    assert main(["run", str(SCENARIOS / "flat_user.json"), "--out", str(tmp_path)]) == 0


def test_list_experiments(capsys):
    assert main(["--list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_reruns_are_byte_identical(tmp_path):
    scen = load_scenario(SCENARIOS / "pinch_report.yaml")
    a = run_scenario(scen, samples=30)
    b = run_scenario(scen, samples=30)
    assert a[1] == b[1]
    assert a[0] == b[0]
    c = run_scenario(scen, seed=7, samples=30)
    assert c[1] != a[1]


@pytest.mark.parametrize("path", sorted(SCENARIOS.iterdir()), ids=lambda p: p.name)
def test_shipped_scenarios_pass(path, tmp_path):
    assert main(["run", str(path), "--out", str(tmp_path), "--samples", "20"]) == 0


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "killinglab.cli", "--list-experiments"], capture_output=True, text=True)
    assert r.returncode == 0 and "flat-classify" in r.stdout
