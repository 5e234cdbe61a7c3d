import csv
import json
import subprocess
import sys

import pytest

from relcalc.cli import DEFAULTS, load_config, main
from relcalc.errors import ConfigError


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def report(out, sub):
    return json.loads((out / f"{sub}_report.json").read_text())


def test_defaults_are_complete():
    cfg = load_config(None)
    assert cfg == DEFAULTS


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write_cfg(tmp_path, {"geometry": {"dimension": 3}}))
    assert main(["relations", "--config", write_cfg(tmp_path, {"colour": 1}), "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("cfg", [
    {"geometry": {"N": 15}},
    {"geometry": {"n": 1, "d": 1}},
    {"tolerances": {"twisted": -1}},
    {"sampling": {"seed": "zero"}},
    {"output": {"formats": ["xml"]}},
])
def test_invalid_values_exit_2(tmp_path, cfg):
    assert main(["relations", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path)]) == 2


def test_unreadable_config_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["relations", "--config", str(bad)]) == 2
    assert main(["relations", "--config", str(tmp_path / "missing.json")]) == 2


def test_unknown_subcommand_exit_2(capsys):
    assert main(["frobnicate"]) == 2
    assert "unknown subcommand" in capsys.readouterr().err


def test_relations_default(tmp_path):
    assert main(["relations", "--out", str(tmp_path)]) == 0
    rep = report(tmp_path, "relations")
    assert rep["status"] == "pass"
    with open(tmp_path / "relations_table.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 25
    assert set(rows[0]) == {"left", "right", "composition"}
    for rec in rep["checks"]:
        assert set(rec) == {"name", "paper_ref", "status", "measured", "expected", "tolerance"}
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)


def test_exit_1_on_failed_check(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"geometry": {"N": [8]}, "tolerances": {"roundtrip": 1e-300}})
    assert main(["quantize", "--config", cfg, "--out", str(tmp_path)]) == 1
    rep = report(tmp_path, "quantize")
    assert rep["status"] == "fail"
    assert any(c["status"] == "fail" for c in rep["checks"])
    assert "FAIL" in capsys.readouterr().err


def test_env_var_sets_output_dir(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv("RELCALC_OUT", str(target))
    cfg = write_cfg(tmp_path, {"output": {"dir": str(tmp_path / "from_config")}})
    assert main(["groupoids", "--config", cfg]) == 0
    assert (target / "groupoids_report.json").exists()
    assert not (tmp_path / "from_config").exists()
    # --out wins over the environment
    assert main(["groupoids", "--config", cfg, "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "groupoids_report.json").exists()


def test_seed_override(tmp_path):
    assert main(["relations", "--seed", "7", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "relations")["config"]["sampling"]["seed"] == 7
    assert main(["relations", "--seed", "-1", "--out", str(tmp_path)]) == 2


def test_json_only_format(tmp_path):
    cfg = write_cfg(tmp_path, {"output": {"formats": ["json"]}})
    assert main(["relations", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "relations_table.csv").exists()


def test_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["groupoids", "--out", str(out)]) == 0
    ra, rb = report(a, "groupoids"), report(b, "groupoids")
    ra.pop("meta"), rb.pop("meta")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_genpair_n16(tmp_path):
    cfg = write_cfg(tmp_path, {"geometry": {"N": [16]}})
    assert main(["genpair", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = report(tmp_path, "genpair")
    residuals = [c for c in rep["checks"] if c["name"].endswith((".identity", ".adjoint"))]
    assert len(residuals) == 2
    assert all(c["measured"] <= 1e-8 for c in residuals)


def test_norms_forced_flag(tmp_path):
    cfg = write_cfg(tmp_path, {"geometry": {"N": [8, 16]}, "orders": {"m_g": -0.25}})
    assert main(["norms", "--config", cfg, "--out", str(tmp_path)]) == 2
    code = main(["norms", "--config", cfg, "--force", "--out", str(tmp_path)])
    assert code in (0, 1)
    assert (tmp_path / "norms.csv").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "relcalc", "blowup", "--out", str(tmp_path)],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert "blowup:" in proc.stdout


def test_norms_sweep_csv(tmp_path):
    cfg = write_cfg(tmp_path, {"geometry": {"n": 2, "d": 1, "N": [16, 32, 64]},
                               "orders": {"m_g": -0.75, "k_g": 1, "k_c": 1, "k_b": 1}})
    assert main(["norms", "--config", cfg, "--out", str(tmp_path)]) == 0
    with open(tmp_path / "norms.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["N"]) for r in rows] == [16, 32, 64]
    norms = [float(r["norm"]) for r in rows]
    assert max(norms) / min(norms) <= 1.10
