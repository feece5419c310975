"""Sweep harness, CSV/manifest artifacts, config files, and the CLI."""

import json
import subprocess
import sys

import numpy as np
import pytest

from dmtlink.config import (apply_settings, default_settings_text,
                            load_scenario, parse_kv_text)
from dmtlink.errors import ConfigError
from dmtlink.link import ScenarioConfig
from dmtlink.sweep import (SWEEP_COLUMNS, SweepSpec, manifest_path_for,
                           point_scenarios, read_sweep_csv, run_sweep,
                           write_run_manifest, write_sweep_csv)

FAST = ScenarioConfig(min_payload_bits=60_000)


def test_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(variable="seed", values=(1.0,))
    with pytest.raises(ConfigError):
        SweepSpec(variable="length_km", values=())


def test_seeds_follow_the_swept_value():
    spec = SweepSpec(variable="length_km", values=(0.0, 2.0, 0.0),
                     base=ScenarioConfig(seed=50))
    scenarios = point_scenarios(spec)
    assert scenarios[0].seed == scenarios[2].seed
    assert scenarios[0].seed != scenarios[1].seed
    assert scenarios[0].length_km == 0.0 and scenarios[1].length_km == 2.0
    # the seed depends on the value, not the position in the list
    moved = point_scenarios(SweepSpec(variable="length_km",
                                      values=(2.0,),
                                      base=ScenarioConfig(seed=50)))
    assert moved[0].seed == scenarios[1].seed


def test_duplicate_value_reproduces_its_row(tmp_path):
    spec = SweepSpec(variable="received_power_dbm",
                     values=(-6.0, -8.0, -6.0), base=FAST)
    results = run_sweep(spec)
    path = write_sweep_csv(tmp_path / "dup.csv", spec, results)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert lines[1] == lines[3]
    assert lines[1] != lines[2]


def test_sweep_csv_is_byte_stable(tmp_path):
    spec = SweepSpec(variable="received_power_dbm", values=(-5.0, -7.0),
                     base=FAST)
    a = write_sweep_csv(tmp_path / "a.csv", spec, run_sweep(spec))
    b = write_sweep_csv(tmp_path / "b.csv", spec, run_sweep(spec))
    assert a.read_bytes() == b.read_bytes()


def test_csv_roundtrip_types(tmp_path):
    spec = SweepSpec(variable="received_power_dbm", values=(-5.0, -30.0),
                     base=FAST)
    results = run_sweep(spec)
    path = write_sweep_csv(tmp_path / "s.csv", spec, results)
    cols = read_sweep_csv(path)
    assert cols["fec_pass"].dtype == bool
    assert cols["gross_bits"].dtype.kind == "i"
    assert cols["seed"].dtype.kind == "i"
    assert np.allclose(cols["x"], (-5.0, -30.0))
    assert cols["fec_pass"][0]
    # starved point: no report, row records nan/0
    assert not cols["fec_pass"][1]
    with pytest.raises(ConfigError):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        read_sweep_csv(bad)


def test_manifest_contents(tmp_path):
    spec = SweepSpec(variable="length_km", values=(0.0,), base=FAST)
    results = run_sweep(spec)
    csv = write_sweep_csv(tmp_path / "m.csv", spec, results)
    manifest = write_run_manifest(manifest_path_for(csv), spec, results)
    assert manifest.name == "m.manifest.json"
    doc = json.loads(manifest.read_text())
    assert doc["tool"] == "dmtlink"
    assert doc["columns"] == list(SWEEP_COLUMNS)
    assert doc["sweep"]["variable"] == "length_km"
    assert doc["scenario"]["band"] == "O"
    assert doc["points"][0]["status"] == "ok"


def test_worker_pool_matches_serial(tmp_path):
    spec1 = SweepSpec(variable="received_power_dbm", values=(-5.0, -7.0),
                      base=FAST, workers=1)
    spec2 = SweepSpec(variable="received_power_dbm", values=(-5.0, -7.0),
                      base=FAST, workers=2)
    a = write_sweep_csv(tmp_path / "w1.csv", spec1, run_sweep(spec1))
    b = write_sweep_csv(tmp_path / "w2.csv", spec2, run_sweep(spec2))
    assert a.read_text() == b.read_text()


def test_power_sweep_ber_rises_as_power_drops():
    values = (-4.0, -6.0, -8.0, -10.0, -12.0)
    spec = SweepSpec(variable="received_power_dbm", values=values,
                     base=ScenarioConfig(band="C", data_rate="25G",
                                         min_payload_bits=400_000))
    bers = [r.pre_fec_ber for r in run_sweep(spec)]
    assert all(np.isfinite(bers))
    assert bers[-1] > 5 * max(bers[0], 1e-7)
    for lo, hi in zip(bers, bers[1:]):
        # small-count noise aside, lower power must not help
        assert hi >= 0.5 * lo


# -- config files ------------------------------------------------------------

def test_parse_kv_text():
    text = "# comment\n scenario.band = C \n\n receiver.voa_db=3 # inline\n"
    assert parse_kv_text(text) == {"scenario.band": "C",
                                   "receiver.voa_db": "3"}
    with pytest.raises(ConfigError):
        parse_kv_text("scenario.band\n")


def test_apply_settings_routes_keys():
    sc = apply_settings(ScenarioConfig(), {
        "scenario.band": "C",
        "scenario.received_power_dbm": "none",
        "scenario.target_bits": "500",
        "receiver.voa_db": "3",
    })
    assert sc.band == "C"
    assert sc.received_power_dbm is None
    assert sc.target_bits == 500
    assert sc.overrides["receiver.voa_db"] == "3"
    for bad in ({"scenario.nope": 1}, {"laser.power": 1},
                {"receiver.pilot_count": 1}):
        with pytest.raises(ConfigError):
            apply_settings(ScenarioConfig(), bad)


def test_load_scenario_file_then_cli(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scenario.band=C\nscenario.length_km=50\n")
    sc = load_scenario(cfg, ["scenario.length_km=25",
                             "eml.modulation_index=0.03"])
    assert sc.band == "C"
    assert sc.length_km == 25.0  # CLI pair wins over the file
    assert sc.overrides["eml.modulation_index"] == "0.03"
    with pytest.raises(ConfigError):
        load_scenario(None, ["just-a-word"])


def test_defaults_text_round_trips():
    text = default_settings_text()
    settings = parse_kv_text(text)
    assert settings["scenario.band"] == "O"
    assert settings["scenario.received_power_dbm"] == "none"
    # feeding the defaults back changes nothing that resolve checks
    sc = apply_settings(ScenarioConfig(), settings)
    assert sc.band == "O" and sc.received_power_dbm is None
    from dmtlink.link import resolve_setup
    resolve_setup(sc)


# -- the installed command line ---------------------------------------------

def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "dmtlink.cli", *argv],
                          capture_output=True, text=True, timeout=300)
    return proc


def test_cli_run_passing_point():
    proc = _cli("run", "-o", "scenario.received_power_dbm=-7",
                "-o", "scenario.min_payload_bits=60000",
                "-o", "scenario.seed=903")
    assert proc.returncode == 0, proc.stderr
    assert "fec_pass=1" in proc.stdout
    assert "status=ok" in proc.stdout


def test_cli_run_failing_point_exits_2():
    proc = _cli("run", "-o", "scenario.launch_power_dbm=-60",
                "-o", "scenario.min_payload_bits=60000")
    assert proc.returncode == 2, proc.stdout + proc.stderr


def test_cli_rejects_unknown_key():
    proc = _cli("run", "-o", "scenario.warp_factor=9")
    assert proc.returncode == 1
    assert "config error" in proc.stderr


def test_cli_sweep_writes_artifacts(tmp_path):
    out = tmp_path / "sweep.csv"
    proc = _cli("sweep", "--sweep", "received_power_dbm",
                "--values=-5,-7", "--out", str(out),
                "-o", "scenario.min_payload_bits=60000")
    assert proc.returncode == 0, proc.stderr
    cols = read_sweep_csv(out)
    assert cols["x"].tolist() == [-5.0, -7.0]
    doc = json.loads(manifest_path_for(out).read_text())
    assert doc["sweep"]["values"] == [-5.0, -7.0]


def test_cli_notch_table(tmp_path):
    out = tmp_path / "notch.csv"
    proc = _cli("notch", "--band", "C", "--length", "25", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert "notches_ghz=" in proc.stdout
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "f_ghz,response_db"
    assert len(lines) == 1026
    db = np.array([float(l.split(",")[1]) for l in lines[1:]])
    assert db.min() < -25.0  # the in-band dispersion notch
    assert db[0] == pytest.approx(0.0, abs=1e-6)


def test_cli_defaults_prints_every_key():
    proc = _cli("defaults")
    assert proc.returncode == 0
    parsed = parse_kv_text(proc.stdout)
    assert "receiver.thermal_noise_density" in parsed
    assert "eml.chirp_alpha" in parsed
