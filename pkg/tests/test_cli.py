import csv
import json
from pathlib import Path

import numpy as np
import pytest

from softcone.cli import cmd_check_axioms, cmd_slice, cmd_solve, cmd_trace, main

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def load(name):
    return json.loads((PROBLEMS / name).read_text())


def write(tmp_path, raw, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


class TestSolve:
    def test_banach_demo(self, tmp_path):
        out, trace = tmp_path / "cert.json", tmp_path / "trace.csv"
        assert cmd_solve(PROBLEMS / "banach.json", out, trace) == 0
        cert = json.loads(out.read_text())
        assert cert["status"] == "converged" and cert["family"] == "banach"
        assert cert["uniqueness"] == "unique" and cert["contraction_witnessed"]
        for v in cert["fixed_element"]["values"].values():
            assert v == pytest.approx(2.0, abs=1e-9)
        rows = list(csv.DictReader(trace.open()))
        assert rows[0]["n"] == "1" and float(rows[0]["residual_value"]) == 1.0
        assert len(rows) == 2 * cert["iterations"]

    def test_canonical_output(self, tmp_path):
        out = tmp_path / "cert.json"
        cmd_solve(PROBLEMS / "kannan.json", out)
        text = out.read_text()
        assert text.endswith("}\n") and " " not in text
        assert list(json.loads(text)) == sorted(json.loads(text))

    def test_stdout(self, capsys):
        assert main(["solve", "--problem", str(PROBLEMS / "power.json")]) == 0
        cert = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(cert["fixed_element"]["values"]["a"], [3.75, 1.375],
                                   atol=1e-8)

    def test_t_out_of_range(self, tmp_path, capsys):
        raw = load("banach.json")
        raw["spec"]["t"] = 1.0
        assert cmd_solve(write(tmp_path, raw)) == 1
        assert "t out of range" in capsys.readouterr().err

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"params": ["a"]}'])
    def test_schema_errors(self, tmp_path, text, capsys):
        path = tmp_path / "bad.json"
        path.write_text(text)
        assert cmd_solve(path) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_file(self, tmp_path):
        assert cmd_solve(tmp_path / "nope.json") == 1

    def test_max_iter(self, tmp_path):
        raw = load("banach.json")
        raw["max_iter"] = 3
        out = tmp_path / "cert.json"
        assert cmd_solve(write(tmp_path, raw), out) == 2
        assert json.loads(out.read_text())["status"] == "max_iter_exceeded"

    def test_env_max_iter(self, monkeypatch):
        monkeypatch.setenv("SOFTCONE_MAX_ITER", "2")
        assert cmd_solve(PROBLEMS / "banach.json", "/dev/null") == 2

    def test_refuted(self, tmp_path):
        raw = load("banach.json")
        raw["map"] = {"kind": "registry", "id": "double"}
        assert cmd_solve(write(tmp_path, raw)) == 3

    def test_ball(self, tmp_path):
        out = tmp_path / "cert.json"
        assert cmd_solve(PROBLEMS / "ball.json", out) == 0
        assert json.loads(out.read_text())["in_ball"] is True
        assert cmd_solve(PROBLEMS / "ball_violated.json") == 4


def test_trace_command(tmp_path):
    out = tmp_path / "t.csv"
    assert cmd_trace(PROBLEMS / "banach.json", out) == 0
    header = out.read_text().splitlines()[0]
    assert header == "n,label,coordinate,residual_value,residual_maxnorm"


class TestCheckAxioms:
    def test_example_metric(self, capsys):
        assert cmd_check_axioms(PROBLEMS / "example_metric.json", trials=1000) == 0
        lines = capsys.readouterr().out.splitlines()
        assert [ln.split(":")[0] for ln in lines] == ["d1", "d2", "d3", "cone"]

    def test_broken_metric(self, capsys):
        assert cmd_check_axioms(PROBLEMS / "broken_metric.json", trials=50) == 5
        assert "counterexample=" in capsys.readouterr().out

    def test_zero_trials(self, capsys):
        assert cmd_check_axioms(PROBLEMS / "example_metric.json", trials=0) == 1
        assert "trials must be positive" in capsys.readouterr().err


class TestSlice:
    def test_crisp_abs(self, tmp_path, capsys):
        raw = {"params": ["a", "b"], "metric": {"type": "crisp", "name": "abs"}}
        assert cmd_slice(write(tmp_path, raw), label="a") == 0
        assert "label a:" in capsys.readouterr().out

    def test_family_matches_members(self, capsys):
        assert cmd_slice(PROBLEMS / "family_metric.json") == 0
        out = capsys.readouterr().out
        assert out.count("matches family member") == 2 and "False" not in out

    def test_cross_label(self, capsys):
        assert main(["slice", "--problem", str(PROBLEMS / "cross_label.json")]) == 6
        assert "pair 1:" in capsys.readouterr().out

    def test_unknown_label(self):
        assert cmd_slice(PROBLEMS / "family_metric.json", label="zzz") == 1


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cmd_solve(PROBLEMS / "kannan.json", a)
    cmd_solve(PROBLEMS / "kannan.json", b)
    assert a.read_bytes() == b.read_bytes()
