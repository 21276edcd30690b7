import json

import pytest

from pathmeasure import __version__
from pathmeasure.cli import main
from pathmeasure.config import SCENARIOS, validate, validate_dict


def write(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_shipped_configs_validate():
    from pathlib import Path

    configs = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))
    assert {json.loads(p.read_text())["scenario"] for p in configs} == set(SCENARIOS)
    for p in configs:
        assert validate(p.read_bytes()) == [], p.name


def test_unknown_scenario_lists_choices():
    diags = validate_dict({"scenario": "tunnel", "parameters": {}})
    assert len(diags) == 1
    assert diags[0].startswith("$.scenario")
    assert all(s in diags[0] for s in SCENARIOS)


def test_field_path_diagnostics(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "twoslit", "seed": 1, "parameters": {"t_mask": 70, "T": 60}})
    assert main(["validate", str(cfg)]) == 2
    out = capsys.readouterr().out
    assert "$.parameters.t_mask" in out


def test_monte_carlo_requires_seed():
    diags = validate_dict({"scenario": "ip", "parameters": {}})
    assert any(d.startswith("$.seed") for d in diags)
    assert validate_dict({"scenario": "bell", "parameters": {"random_models": 0}}) == []


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["validate", str(path)]) == 2
    assert main(["run", str(path)]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_run_bell_writes_outputs(tmp_path, capsys):
    cfg = write(tmp_path, {"scenario": "bell", "seed": 3, "parameters": {"size": 3, "random_models": 200,
                                                                          "random_max_size": 3}})
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["invariant_checks"]["failed"] == 0
    assert manifest["config"]["seed"] == 3
    raw = (out / "bell_shared.csv").read_bytes()
    assert raw.startswith(b"size [count],max_abs_S [1]\r\n")
    assert "[PASS]" in capsys.readouterr().out


def test_seed_override_and_env_out(tmp_path, monkeypatch):
    cfg = write(tmp_path, {"scenario": "bell", "seed": 3, "parameters": {"size": 2, "random_models": 100,
                                                                          "random_max_size": 2}})
    monkeypatch.setenv("PATHMEASURE_OUT", str(tmp_path / "env"))
    assert main(["run", str(cfg), "--seed", "9"]) == 0
    manifest = json.loads((tmp_path / "env" / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 9


def test_numerical_failure_exit_code(tmp_path):
    cfg = write(tmp_path, {
        "scenario": "measure",
        "parameters": {"potential": {"kind": "free"}, "T": 50.0, "source": {"sigma0": 0.5},
                       "grid": {"x_min": -10.0, "x_max": 10.0, "n": 256}, "steps": 10,
                       "regions": [{"name": "all", "intervals": "full"}]},
    })
    assert validate(cfg.read_bytes()) == []
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_action_check_figures(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = write(tmp_path, {"scenario": "action-check", "parameters": {
        "potential": {"kind": "harmonic", "omega": 1.0}, "x_start": 0.0, "x_final": 1.0, "T": 1.0, "steps": 200}})
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out), "--figures"]) == 0
    pngs = list((out / "figures").glob("*.png"))
    assert pngs and all(p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in pngs)
