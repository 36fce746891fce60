import json

import numpy as np
import pytest

import thermalrabi as tr
from thermalrabi import ConfigError, SweepConfig, classify_region, parse_config
from thermalrabi.io import config_hash, fmt, read_csv, read_manifest, write_csv
from thermalrabi.sweep import (MARKERS, run_point_sweep, validate_config,
                               write_sweep)


def small_config(tmp_path, **kw):
    base = dict(task="g2zero", g_min=0.1, g_max=0.9, g_steps=3,
                t_min=0.07, t_max=0.2, t_steps=2, n_fock=10,
                check_convergence=False, out=str(tmp_path), plot=False)
    base.update(kw)
    return validate_config(SweepConfig(**base))


def test_fmt_twelve_significant_digits():
    assert fmt(np.pi) == "3.14159265359"
    assert fmt(1.0) == "1"
    assert fmt(1e-30) == "1e-30"
    assert fmt(True) == "1"
    assert fmt(float("nan")) == "nan"
    assert fmt(7) == "7"


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "x.csv", ["a", "b"],
                     [(1.5, "ok"), (float("nan"), "bad")],
                     metadata={"g": 0.5, "note": "hello"})
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    meta, cols, rows = read_csv(path)
    assert meta == {"g": "0.5", "note": "hello"}
    assert cols == ["a", "b"]
    assert rows == [["1.5", "ok"], ["nan", "bad"]]


def test_parse_config_defaults(tmp_path):
    empty = tmp_path / "empty.cfg"
    empty.write_text("")
    config = parse_config(str(empty))
    assert config.model == "rabi"
    assert config.omega_x == 1.0
    assert config.n_fock == 20
    assert config.gamma_a == 0.01 and config.gamma_x == 0.01


def test_parse_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\n g_max = 0.8\nn_fock=24\nmarkers=true\n")
    config = parse_config(str(cfg), {"n_fock": 30, "task": "g2zero"})
    assert config.g_max == 0.8
    assert config.n_fock == 30  # flag wins over file
    assert config.markers is True


def test_parse_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("fock_cutoff=10\n")
    with pytest.raises(ConfigError, match="fock_cutoff"):
        parse_config(str(cfg))


def test_parse_config_range_violation():
    with pytest.raises(ConfigError, match=r"g range.*1\.5"):
        parse_config(None, {"g_max": 2.5})
    with pytest.raises(ConfigError, match="t range"):
        parse_config(None, {"t_min": 0.001})
    with pytest.raises(ConfigError, match="workers"):
        parse_config(None, {"workers": 0})


def test_parse_config_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/path.cfg")


def test_marker_preset_expands_to_paper_points():
    config = validate_config(SweepConfig(markers=True))
    assert config.points() == [(0.1, 0.2), (0.2, 0.1), (0.5, 0.07), (0.9, 0.15)]
    assert MARKERS == ((0.1, 0.2), (0.2, 0.1), (0.5, 0.07), (0.9, 0.15))


def test_workers_env_default(monkeypatch):
    monkeypatch.setenv("THERMALRABI_WORKERS", "3")
    assert SweepConfig().workers == 3
    monkeypatch.delenv("THERMALRABI_WORKERS")
    assert SweepConfig().workers == 1


def test_classify_region_edges():
    assert classify_region(2.5) == "red"
    assert classify_region(2.0) == "green"
    assert classify_region(1.9995) == "green"
    assert classify_region(1.999) == "gray"
    assert classify_region(1.0) == "gray"
    assert classify_region(0.3) == "blue"
    assert classify_region(float("nan")) == ""


def test_run_point_sweep_grid_order_and_regions(tmp_path):
    config = small_config(tmp_path)
    result = run_point_sweep(config)
    assert len(result.records) == 6
    gs = [r.g for r in result.records]
    ts = [r.temperature for r in result.records]
    assert gs == [0.1, 0.1, 0.5, 0.5, 0.9, 0.9]  # g outer, T inner
    assert ts == [0.07, 0.2, 0.07, 0.2, 0.07, 0.2]
    by_point = {(r.g, r.temperature): r for r in result.records}
    assert by_point[(0.5, 0.07)].region == "blue"
    assert by_point[(0.9, 0.07)].region == "blue"
    assert by_point[(0.9, 0.2)].region == "red"
    assert result.n_failed == 0


def test_sweep_determinism_across_worker_counts(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    r1 = run_point_sweep(small_config(out1, workers=1))
    write_sweep(r1)
    r2 = run_point_sweep(small_config(out2, workers=2))
    write_sweep(r2)
    assert (out1 / "g2zero.csv").read_bytes() == (out2 / "g2zero.csv").read_bytes()


def test_sweep_manifest_contents(tmp_path):
    config = small_config(tmp_path)
    result = run_point_sweep(config)
    write_sweep(result)
    manifest = read_manifest(tmp_path / "manifest.json")
    assert manifest["task"] == "g2zero"
    assert manifest["points_total"] == 6
    assert manifest["points_failed"] == 0
    assert manifest["config_hash"] == config_hash(config.as_dict())
    assert len(manifest["per_point"]) == 6


def test_sweep_resume_recomputes_only_failed(tmp_path):
    config = small_config(tmp_path)
    write_sweep(run_point_sweep(config))
    csv_path = tmp_path / "g2zero.csv"
    lines = csv_path.read_text().splitlines()
    tampered = lines[:]
    tampered[-1] = ",".join(lines[-1].split(",")[:2] + ["nan", "", "10", "0",
                                                        "error:Synthetic"])
    csv_path.write_text("\n".join(tampered) + "\n")
    resumed = run_point_sweep(config)
    assert resumed.records[-1].status == "ok"
    assert resumed.records[-1].wall_ms > 0.0     # recomputed
    assert all(r.wall_ms == 0.0 for r in resumed.records[:-1])  # reused
    write_sweep(resumed)
    assert csv_path.read_text().splitlines() == lines


def test_sweep_resume_ignores_other_config(tmp_path):
    config = small_config(tmp_path)
    write_sweep(run_point_sweep(config))
    other = small_config(tmp_path, n_fock=12)
    result = run_point_sweep(other)  # hash differs: full recompute
    assert all(r.status == "ok" for r in result.records)
    assert all(r.n_fock == 12 for r in result.records)


def test_sweep_json_format(tmp_path):
    config = small_config(tmp_path, format="json")
    result = run_point_sweep(config)
    paths = write_sweep(result)
    payload = json.loads((tmp_path / "g2zero.json").read_text())
    assert len(payload) == 6
    assert set(payload[0]) == {"g", "T", "g2", "region", "n_fock",
                               "converged", "status"}
    assert any(p.name == "manifest.json" for p in paths)


def test_convergence_flag_reported(tmp_path):
    # deliberately tiny truncation at strong coupling: flag must trip
    config = small_config(tmp_path, g_min=0.9, g_max=0.9, g_steps=1,
                          t_min=0.2, t_max=0.2, t_steps=1, n_fock=6,
                          check_convergence=True)
    result = run_point_sweep(config)
    assert result.records[0].status == "ok"
    assert not result.records[0].converged
    assert not result.all_converged


def test_multi_tls_and_two_mode_model_configs(tmp_path):
    config = small_config(tmp_path, model="multi-tls:2", g_min=0.3, g_max=0.3,
                          g_steps=1, t_min=0.05, t_max=0.05, t_steps=1,
                          n_fock=8)
    result = run_point_sweep(config)
    assert result.records[0].region == "blue"
    params = config.model_params(0.3)
    assert isinstance(params, tr.MultiTlsParams) and len(params.tls) == 2

    config2 = small_config(tmp_path / "tm", model="two-mode", g_min=0.3,
                           g_max=0.3, g_steps=1, t_min=0.05, t_max=0.05,
                           t_steps=1, n_fock=8, n_fock2=6)
    params2 = config2.model_params(0.3)
    assert params2.mode2 == (2.0, 0.6)  # twice the frequency and coupling
    result2 = run_point_sweep(config2)
    assert result2.records[0].status == "ok"
    assert result2.records[0].value < result.records[0].value * 1.5


def test_config_hash_stable_under_key_order():
    a = config_hash({"x": 1, "y": 2})
    b = config_hash({"y": 2, "x": 1})
    assert a == b
    assert a != config_hash({"x": 1, "y": 3})
