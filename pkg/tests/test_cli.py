import csv
import json
import subprocess
import sys

import pytest
from jsonschema import Draft7Validator

from metspec.cli import main
from metspec.config import CONFIG_SCHEMA, ConfigError, validate_config, with_defaults
from metspec.experiments import CATALOG

DRIFT = {"schema_version": 1, "experiment": "drift", "space": {"type": "euclidean", "dim": 2},
         "map": {"type": "translation", "c": [3, 4]}, "horizon": 50}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _error_path(cfg):
    with pytest.raises(ConfigError) as exc:
        validate_config(cfg)
    return exc.value.path


def test_schema_errors_carry_paths():
    assert _error_path(dict(DRIFT, horizon=0)) == "$.horizon"
    assert _error_path(dict(DRIFT, bogus=1)) == "$"
    assert _error_path(dict(DRIFT, map={"type": "translation", "c": [3, "x"]})) == "$.map.c[1]"
    assert _error_path(dict(DRIFT, eps_schedule=[0.5, 0.5])) == "$.eps_schedule"
    assert _error_path(dict(DRIFT, output={"formats": ["xml"]})) == "$.output.formats[0]"
    assert _error_path(dict(DRIFT, params={"eps": -1})) == "$.params.eps"
    assert _error_path({"schema_version": 2, "experiment": "drift"}) == "$.schema_version"


def test_catalog_examples_are_valid():
    validator = Draft7Validator(CONFIG_SCHEMA)
    for name, entry in CATALOG.items():
        assert entry["example"]["experiment"] == name
        assert not list(validator.iter_errors(entry["example"]))
        validate_config(with_defaults(entry["example"]))


def test_run_exit_codes_and_messages(tmp_path, capsys):
    assert main(["run", _write(tmp_path, DRIFT), "--out", str(tmp_path / "a")]) == 0
    assert "PASS drift" in capsys.readouterr().out
    assert main(["run", _write(tmp_path, dict(DRIFT, horizon=-3), "bad.json")]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: $.horizon")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["run", str(broken)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_failing_check_exits_one(tmp_path):
    cfg = {"schema_version": 1, "experiment": "lyapunov", "horizon": 2000, "seed": 1,
           "driver": {"kind": "iid", "family": [{"type": "left-mult", "matrix": [[4, 0], [0, 1]]},
                                                {"type": "left-mult", "matrix": [[1, 0], [0, 2]]}]},
           "params": {"expected": 5.0}}
    assert main(["run", _write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    report = json.loads((tmp_path / "o" / "run.report.json").read_text())
    assert report["passed"] is False


def test_outputs_are_reproducible(tmp_path):
    cfg = _write(tmp_path, CATALOG["functional"]["example"])
    for d in ("a", "b"):
        assert main(["run", cfg, "--out", str(tmp_path / d)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "run.report.json" in names and "run.timing.json" in names
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in names:
        if name != "run.timing.json":
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
    assert "wall_time_s" not in (tmp_path / "a" / "run.report.json").read_text()


def test_csv_tables(tmp_path):
    cfg = dict(DRIFT, output={"formats": ["csv"], "prefix": "t1"})
    assert main(["run", _write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
    tables = sorted(tmp_path.glob("t1.*.csv"))
    assert tables
    assert not (tmp_path / "t1.report.json").exists()
    with open(tables[0], newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("METSPEC_OUT", str(tmp_path / "env"))
    assert main(["run", _write(tmp_path, DRIFT)]) == 0
    assert (tmp_path / "env" / "run.report.json").exists()


def test_overrides_are_validated(tmp_path, capsys):
    path = _write(tmp_path, DRIFT)
    assert main(["run", path, "--horizon", "0"]) == 2
    assert "$.horizon" in capsys.readouterr().err
    assert main(["run", path, "--seed", "3", "--horizon", "20", "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "run.report.json").read_text())
    assert report["config"]["horizon"] == 20 and report["config"]["seed"] == 3


def test_list(capsys):
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    for name in CATALOG:
        assert f"{name}:" in text
    assert main(["list", "--json"]) == 0
    listing = json.loads(capsys.readouterr().out)
    assert set(listing) == set(CATALOG)
    assert all({"topic", "params_schema", "example"} <= set(v) for v in listing.values())


def test_validate_prints_defaults(tmp_path, capsys):
    assert main(["validate", _write(tmp_path, DRIFT)]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["seed"] == 0 and cfg["output"]["prefix"] == "run"
    assert cfg["eps_schedule"][0] == 0.5 and len(cfg["eps_schedule"]) == 10
    assert main(["validate", _write(tmp_path, dict(DRIFT, seed=-1), "neg.json")]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "metspec.cli", "run", _write(tmp_path, DRIFT),
                           "--out", str(tmp_path / "sub")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "metspec.cli", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2
