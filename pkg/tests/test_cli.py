import csv
import json
import subprocess
import sys

import pytest

from daisyforge.cli import run


@pytest.fixture
def cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_basis_then_verify(cwd, capsys):
    assert run(["construct", "basis", "--q", "3", "--r", "3", "--out", "f.json"]) == 0
    cert = _json_out(capsys)
    assert cert["size"] == 1872 and cert["status"] == "verified"
    assert (cwd / "f.cert.json").exists()
    assert run(["verify", "daisy", "--family", "f.json", "--s", "2", "--t", "5"]) == 0
    cert = _json_out(capsys)
    assert cert["kind"] == "daisy_free" and cert["result"] is True
    assert cert["inputs"]["family"]["path"] == "f.json"


def test_refutation_exit_code(cwd, capsys):
    run(["construct", "basis", "--q", "2", "--r", "3", "--out", "f.json"])
    capsys.readouterr()
    assert run(["verify", "daisy", "--family", "f.json", "--s", "1", "--t", "4", "--out", "c.json"]) == 2
    cert = json.loads((cwd / "c.json").read_text())
    assert cert["status"] == "refuted" and cert["witness"] is not None
    assert run(["check", "c.json"]) == 0


def test_lemma_arc(cwd, capsys):
    assert run(["lemma", "arc", "--q", "5", "--dim", "3", "--j", "3", "--cap", "7"]) == 0
    cert = _json_out(capsys)
    assert cert["max_size"] == 6 and cert["exhaustive"] is True
    assert run(["lemma", "arc", "--q", "5", "--dim", "2", "--cap", "6"]) == 2


def test_lemma_frame_and_pairwise(cwd, capsys):
    assert run(["lemma", "frame", "--q", "5", "--dim", "3"]) == 0
    assert _json_out(capsys)["extends"] is False
    assert run(["lemma", "frame", "--q", "4", "--dim", "3", "--t", "6"]) == 2
    capsys.readouterr()
    assert run(["lemma", "pairwise", "--q", "7"]) == 0
    assert run(["lemma", "any-q", "--q", "3"]) == 0


def test_density_commands(cwd, capsys):
    assert run(["density", "gamma7", "--K", "8"]) == 0
    cert = _json_out(capsys)
    num, den = map(int, cert["bound"].split("/"))
    assert num * 10 <= den
    assert run(["density", "gamma6"]) == 0
    capsys.readouterr()
    assert run(["density", "product", "--q", "5", "--K", "1"]) == 0
    assert _json_out(capsys)["lower"] == "19/25"
    assert run(["density", "trivial", "--d", "7"]) == 0
    assert _json_out(capsys)["bound"] == "1/8"


def test_oracle_commands(cwd, capsys):
    assert run(["oracle", "ex", "--n", "5", "--r", "3", "--t", "4", "--out", "ex.json"]) == 0
    assert _json_out(capsys)["value"] == "8"
    assert run(["check", "ex.json"]) == 0
    capsys.readouterr()
    assert run(["oracle", "g", "--n", "3", "--d", "1"]) == 0
    assert _json_out(capsys)["value"] == "4"
    assert run(["oracle", "l", "--n", "6", "--r", "2"]) == 0
    assert _json_out(capsys)["value"] == "29/15"
    assert run(["oracle", "g", "--n", "7", "--d", "1"]) == 1


def test_oracle_monotone_csv(cwd, capsys):
    assert run(["oracle", "monotone", "--out", "table.csv"]) == 0
    summary = _json_out(capsys)
    assert summary["violations"] == [] and summary["checks"] > 50
    rows = list(csv.DictReader(open(cwd / "table.csv")))
    assert list(rows[0]) == ["quantity", "params", "value", "witness_file", "nodes", "runtime_ms"]
    assert all((cwd / r["witness_file"]).exists() for r in rows)


def test_construct_other_families(cwd, capsys):
    assert run(["construct", "basis", "--q", "2", "--r", "3", "--out", "b.json"]) == 0
    assert run(["construct", "blowup", "--family", "b.json", "--m", "2", "--out", "bb.json"]) == 0
    assert run(["verify", "daisy", "--family", "bb.json", "--s", "2", "--t", "4"]) == 0
    assert run(["construct", "two-layer", "--r", "2", "--w", "0,1", "--out", "tl.json"]) == 0
    assert run(["verify", "two-layer", "--family", "tl.json"]) == 0
    assert run(["construct", "mod-level", "--n", "8", "--d", "3", "--out", "h.json"]) == 0
    assert run(["verify", "hitting", "--family", "h.json", "--d", "3"]) == 0
    assert run(["verify", "hitting", "--family", "h.json", "--d", "2"]) == 2
    capsys.readouterr()
    for name in ("b", "bb", "tl", "h"):
        assert run(["check", f"{name}.cert.json"]) == 0


def test_plan_command(cwd, capsys):
    assert run(["construct", "plan", "--n", "7", "--d", "7", "--out", "p.json"]) == 0
    plan = json.loads((cwd / "p.json").read_text())
    assert [lv["level"] for lv in plan["levels"]] == [3, 7]
    assert plan["levels"][0]["kind"] == "materialized" and plan["levels"][0]["family_ref"]
    assert run(["verify", "hitting", "--family", "p.hitting.json", "--d", "7"]) == 0
    assert run(["check", "p.cert.json"]) == 0
    assert run(["construct", "plan", "--n", "8", "--d", "7", "--out", "x.json"]) == 1


def test_usage_errors_exit_1(cwd, capsys):
    assert run(["verify", "daisy", "--s", "2"]) == 1
    assert "--family" in capsys.readouterr().err
    assert run(["construct", "basis", "--q", "6", "--r", "2", "--out", "f.json"]) == 1
    assert run(["verify", "daisy", "--family", "missing.json", "--s", "2", "--t", "4"]) == 1
    assert run(["nonsense"]) == 1
    assert run(["lemma", "arc", "--q", "5", "--dim", "3", "--cap", "-1"]) == 1


def test_deterministic_bytes(cwd, capsys):
    run(["construct", "basis", "--q", "3", "--r", "3", "--out", "f.json"])
    outs = []
    for k in range(2):
        run(["verify", "daisy", "--family", "f.json", "--s", "3", "--t", "5", "--threads", "2",
             "--out", f"c{k}.json"])
        outs.append((cwd / f"c{k}.json").read_bytes())
    assert outs[0] == outs[1]
    assert b"runtime_ms" not in outs[0]
    assert (cwd / "c0.timing.json").exists()


def test_fast_mode_keeps_runtime(cwd, capsys):
    assert run(["density", "gamma7", "--mode", "fast"]) == 0
    capsys.readouterr()
    run(["lemma", "arc", "--q", "3", "--dim", "2", "--cap", "5", "--mode", "fast"])
    assert "runtime_ms" in _json_out(capsys)


def test_budget_env_and_flags(cwd, capsys, monkeypatch):
    monkeypatch.setenv("DAISYFORGE_BUDGET", "100")
    assert run(["construct", "basis", "--q", "3", "--r", "3", "--out", "f.json"]) == 1
    assert run(["construct", "basis", "--q", "3", "--r", "3", "--out", "f.json",
                "--budget-members", "5000"]) == 0


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "daisyforge", "density", "trivial", "--d", "2"],
                         capture_output=True, text=True, cwd=tmp_path)
    assert out.returncode == 0 and json.loads(out.stdout)["bound"] == "1/3"
