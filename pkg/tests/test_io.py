import csv
import hashlib
import json
from dataclasses import replace

import pytest
import yaml

from klinokinesis.agent import run_simulation
from klinokinesis.cli import main, run_scenario
from klinokinesis.io import (TRAJECTORY_HEADER, ConfigError, config_to_dict, dump_config, emit_metrics,
                             emit_raster, emit_trajectory, load_config, parse_config, write_network)

GOLDEN_FIG7_HEAD = [
    TRAJECTORY_HEADER,
    '0,40,40,50,0.6,0.6,""',
    "1,41,41,51,0.7,0.7,X",
]


def test_presets():
    c7 = load_config("fig7")
    assert c7.sim.initial_position == (40.0, 40.0, 50.0) and c7.sim.c_set == 0.5
    assert type(c7.sim.field).__name__ == "DiscretizedField"
    c6 = load_config("fig6")
    assert c6.sim.initial_position == (14.0, 14.0, 15.0) and c6.sim.c_set == 0.5
    assert type(c6.sim.field).__name__ == "LinearField"
    g = load_config("gaussian")
    assert g.sim.c_set == 1.24 and g.sim.set_level == 1.2


def test_defaults_applied(tmp_path):
    path = tmp_path / "a.yaml"
    path.write_text("c_set: 0.5\ninitial_position: [0, 0, 0]\n"
                    "field: {kind: linear, c0: 0.6, gradient: [0.1, 0.1, -0.1]}\n")
    cfg = load_config(path)
    assert cfg.sim.window_steps == 1000
    assert cfg.sim.n_windows == 500
    assert cfg.sim.initial_signs == (1, 1, 1)


def test_preset_with_override(tmp_path):
    path = tmp_path / "b.yaml"
    path.write_text("preset: fig7\nn_windows: 20\ninitial_signs: [-1, 1, 1]\n")
    cfg = load_config(path)
    assert cfg.sim.n_windows == 20 and cfg.sim.initial_signs == (-1, 1, 1)
    assert cfg.scenario == "fig7"


@pytest.mark.parametrize("data,fragment", [
    ({"preset": "fig7", "n_window": 3}, "n_window"),
    ({"preset": "fig9"}, "preset"),
    ({"c_set": 0.5}, "missing"),
    ({"preset": "fig7", "window_steps": 10}, "window_steps"),
    ({"preset": "fig7", "initial_signs": [1, 2, 1]}, "initial_signs"),
    ({"preset": "fig7", "initial_position": [1, 2]}, "initial_position"),
    ({"preset": "fig7", "field": {"kind": "cubic"}}, "field"),
    ({"preset": "fig7", "step_length": -1}, "step_length"),
    ({"preset": "fig7", "dump_rasters": [600]}, "dump_rasters"),
    ({"preset": "fig7", "network_params": "missing.json"}, "network_params"),
    ({"preset": "fig7", "level_table": [0.3, 0.1]}, "level_table"),
])
def test_validation_names_offending_key(data, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(data)


def test_malformed_and_missing_files(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("c_set: [0.5\n")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(bad)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.yaml")


@pytest.mark.parametrize("name", ["fig6", "fig7", "gaussian"])
def test_config_round_trip(tmp_path, name):
    cfg = load_config(name)
    path = dump_config(cfg, tmp_path / "c.yaml")
    again = load_config(path)
    assert again.sim == cfg.sim
    assert config_to_dict(again) == config_to_dict(cfg)


def test_network_params_file(tmp_path, topology):
    write_network(topology, tmp_path / "net.json")
    path = tmp_path / "c.yaml"
    path.write_text("preset: fig7\nn_windows: 3\nnetwork_params: net.json\n")
    cfg = load_config(path)
    assert cfg.topology() == topology


@pytest.fixture(scope="module")
def fig7_record():
    return run_simulation(load_config("fig7").sim, record_windows=[0])


def test_trajectory_csv_golden(tmp_path, fig7_record):
    path = emit_trajectory(fig7_record, tmp_path)
    lines = path.read_text().splitlines()
    assert lines[:3] == GOLDEN_FIG7_HEAD
    assert len(lines) == 501
    assert all(line.endswith(("X", "Y", "Z", '""')) for line in lines[1:])
    rows = list(csv.reader(lines))
    assert all(len(r) == 7 for r in rows)


def test_csv_floats_use_nine_significant_digits(tmp_path, fig7_record):
    rec = replace(fig7_record, rows=[replace(fig7_record.rows[0], concentration=1 / 3)])
    line = emit_trajectory(rec, tmp_path).read_text().splitlines()[1]
    assert line.split(",")[4] == "0.333333333"


def test_silent_level_is_empty_field(tmp_path):
    rec = run_simulation(replace(load_config("fig6").sim, n_windows=2))
    line = emit_trajectory(rec, tmp_path).read_text().splitlines()[1]
    assert line == '0,14,14,15,-1.1,"",""'


def test_metrics_total_turns_matches_csv(tmp_path, fig7_record):
    traj = emit_trajectory(fig7_record, tmp_path)
    metrics = json.loads(emit_metrics(fig7_record, tmp_path, "fig7").read_text())
    turns = [r["turn_axis"] for r in csv.DictReader(traj.open())]
    assert metrics["total_turns"] == sum(t in ("X", "Y", "Z") for t in turns)
    assert metrics["scenario"] == "fig7"
    assert sum(metrics["turns_per_axis"]) == metrics["total_turns"]


def test_raster_file(tmp_path, fig7_record):
    path = emit_raster(fig7_record.rasters[0], 0, tmp_path)
    lines = path.read_text().splitlines()
    assert path.name == "window_00000.csv"
    assert lines[0].startswith("step,N_ref,N1,N2,N3") and len(lines) == 1001


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_rerun_is_byte_identical(tmp_path):
    a = run_scenario("fig7", tmp_path / "a")
    b = run_scenario("fig7", tmp_path / "b")
    assert _digest(a / "trajectory.csv") == _digest(b / "trajectory.csv")
    assert _digest(a / "metrics.json") == _digest(b / "metrics.json")


def test_cli_run(tmp_path, capsys):
    assert main(["run", "--config", "fig7", "--out", str(tmp_path), "--dump-rasters", "0,3"]) == 0
    assert (tmp_path / "trajectory.csv").is_file()
    assert sorted(p.name for p in (tmp_path / "rasters").iterdir()) == ["window_00000.csv",
                                                                        "window_00003.csv"]


def test_cli_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "x.yaml"
    path.write_text("preset: fig7\nbogus: 1\n")
    assert main(["run", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "bogus" in capsys.readouterr().err
    assert main(["run", "--config", "fig7", "--out", str(tmp_path), "--dump-rasters", "999"]) == 2


def test_cli_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 12 and "FAIL" not in out
    assert main(["verify", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]


def test_cli_sweep(tmp_path, capsys):
    cfgs = tmp_path / "cfgs"
    cfgs.mkdir()
    for name in ("fig6", "fig7"):
        (cfgs / f"{name}.yaml").write_text(yaml.safe_dump({"preset": name, "n_windows": 10}))
    assert main(["sweep", "--configs", str(cfgs), "--out", str(tmp_path / "out"), "--jobs", "2"]) == 0
    for name in ("fig6", "fig7"):
        assert len((tmp_path / "out" / name / "trajectory.csv").read_text().splitlines()) == 11
    assert main(["sweep", "--configs", str(tmp_path / "empty"), "--out", str(tmp_path)]) == 2
