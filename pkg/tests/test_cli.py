import csv
import json
from pathlib import Path

import numpy as np
import pytest

from ptdyson.cli import (
    DYSON_COLUMNS,
    ENERGY_COLUMNS,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    find_boundaries,
    main,
    parse_range,
    sweep_point,
)
from ptdyson.config import ConfigError, load_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _small(tmp_path, name, samples=601, **verify):
    data = json.loads((CONFIGS / name).read_text())
    data["grid"] = {"t0": 0.0, "t1": 60.0, "samples": samples}
    if verify:
        data["verify"] = verify
    path = tmp_path / f"small_{name}"
    path.write_text(json.dumps(data))
    return path


def _read(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_solve_writes_tables(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", "--config", str(_small(tmp_path, "fig1a.json")), "--out", str(out)]) == EXIT_OK
    energies = _read(out / "energies.csv")
    assert energies[0] == ENERGY_COLUMNS
    assert _read(out / "dyson.csv")[0][: len(DYSON_COLUMNS) - 1] == DYSON_COLUMNS[:-1]
    rows = np.array(energies[1:], dtype=float)
    assert len(rows) == 601
    assert np.abs(rows[:, 2]).max() < 1e-10 and np.abs(rows[:, 4]).max() < 1e-10
    assert np.abs(rows[:, 1] + rows[:, 3] + 1.0).max() < 1e-12
    assert (out / "plot_energies.py").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert "config_hash" in manifest


def test_solve_broken_regime(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", "--config", str(_small(tmp_path, "fig2_broken.json")), "--out", str(out)]) == EXIT_OK
    rows = np.array(_read(out / "energies.csv")[1:], dtype=float)
    assert np.abs(rows[:, 2] + rows[:, 4]).max() < 1e-10
    assert np.abs(rows[:, 2]).max() > 1e-3


def test_solve_deterministic(tmp_path):
    cfg = str(_small(tmp_path, "fig1b.json"))
    main(["solve", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["solve", "--config", cfg, "--out", str(tmp_path / "b")])
    for name in ("energies.csv", "dyson.csv", "states.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_verify_exit_codes(tmp_path):
    cfg = _small(tmp_path, "fig1a.json")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "v")]) == EXIT_OK
    report = json.loads((tmp_path / "v" / "verify_report.json").read_text())
    assert report["overall_pass"] is True
    bad = _small(tmp_path, "fig1a.json", corrupt_eta2=0.1)
    assert main(["verify", "--config", str(bad), "--out", str(tmp_path / "w")]) == EXIT_FAIL


def test_usage_errors(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_USAGE
    broken = tmp_path / "bad.json"
    broken.write_text(json.dumps({"schema_version": 1, "model": {"alpha": 0.5}}))
    assert main(["verify", "--config", str(broken), "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert "model.omega" in capsys.readouterr().err
    cfg = str(_small(tmp_path, "fig1a.json"))
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "y"), "--tol-scale", "0"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--config", cfg, "--out", str(tmp_path / "z"), "--param", "omega", "--range", "0:1:3"])
    assert exc.value.code == EXIT_USAGE


def test_parse_range():
    assert parse_range("0:0.99:199") == (0.0, 0.99, 199)
    for bad in ("0:1", "1:0:5", "0:1:1", "a:b:c"):
        with pytest.raises(ConfigError):
            parse_range(bad)


def test_find_boundaries():
    rows = [{"value": v, "phase": p} for v, p in
            [(0.1, "symmetric"), (0.2, "symmetric"), (0.3, "undetermined"), (0.4, "broken"), (0.5, "broken")]]
    (b,) = find_boundaries(rows)
    assert b["estimate"] == pytest.approx(0.3)
    assert (b["from"], b["to"]) == ("symmetric", "broken")


def test_sweep_point_labels(tmp_path):
    cfg = load_config(_small(tmp_path, "fig1a.json"))
    assert sweep_point(cfg, "alpha", 0.5)["phase"] == "symmetric"
    row = sweep_point(cfg, "alpha", 0.98)
    assert row["phase"] == "broken" and row["max_imag_energy"] > 1e-3
    assert sweep_point(cfg, "alpha", 1.0)["phase"] == "invalid-config"


def test_sweep_c1_at_alpha0(tmp_path):
    out = tmp_path / "s"
    cfg = str(_small(tmp_path, "alpha0.json", samples=201))
    assert main(["sweep", "--config", cfg, "--out", str(out), "--param", "c1",
                 "--range", "1.01:2:100", "--workers", "1"]) == EXIT_OK
    boundary = json.loads((out / "sweep_boundary.json").read_text())["boundaries"]
    assert len(boundary) == 1
    assert boundary[0]["estimate"] == pytest.approx(np.sqrt(2.0), abs=0.01)
    assert len(_read(out / "sweep.csv")) == 101


def test_sidecar_script_runs(tmp_path):
    pytest.importorskip("matplotlib")
    import subprocess
    import sys
    out = tmp_path / "o"
    main(["solve", "--config", str(_small(tmp_path, "fig1a.json", samples=101)), "--out", str(out)])
    subprocess.run([sys.executable, "plot_energies.py"], cwd=out, check=True,
                   env={"MPLBACKEND": "Agg", "PATH": ""})
    assert (out / "energies.png").exists()
