import csv
import math
from pathlib import Path

import pytest

from tmafh import cli
from tmafh.config import ConfigError, default_config, dumps, from_mapping, load, loads

GOLDEN = Path(__file__).parent / "golden"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(tmp_path, *args, config_text=None):
    argv = list(args) + ["--out", str(tmp_path)]
    if config_text is not None:
        cfg = tmp_path / "run.toml"
        cfg.write_text(config_text)
        argv += ["--config", str(cfg)]
    return cli.main(argv)


def test_defaults_are_case_study():
    cfg = default_config()
    p = cfg.plan
    assert (p.f_c, p.delta_fsk, p.M, p.K, p.L, p.T_s) == (2.5e9, 50e3, 4, 6, 4, 1e-3)
    assert p.T_h == pytest.approx(4e-3)
    assert cfg.geometry.positions == (0.0, 0.5, 1.0, 1.5)
    assert cfg.theta0 == pytest.approx(math.radians(30))


def test_round_trip():
    cfg = loads('plan.M = 8\nsimulation.n_bits = 48\ngeometry.convention = "custom"\ngeometry.positions = [0, 0.3, 1.25]\n'
                'simulation.ebn0_db = [1.5, 2.0]\n')
    text = dumps(cfg)
    again = loads(text)
    assert again == cfg
    assert dumps(again) == text
    assert loads(dumps(default_config())) == default_config()


def test_ten_ms_reading_supported():
    cfg = loads("plan.T_s = 0.01\nplan.L = 4\n")
    assert cfg.plan.T_h == pytest.approx(0.04)


@pytest.mark.parametrize("text,key", [
    ("plan.M = 3\n", "plan.M"),
    ("plan.f_c = -1.0\n", "plan.f_c"),
    ('plan.K = "six"\n', "plan.K"),
    ("plan.bogus = 1\n", "plan.bogus"),
    ('geometry.convention = "custom"\n', "geometry.positions"),
    ("geometry.positions = [0, 0]\n", "geometry.positions"),
    ("pattern.k = 9\n", "pattern.k"),
    ("simulation.n_trials = 10\n", "simulation.n_trials"),
    ("simulation.n_bits = 3\n", "simulation.n_bits"),
    ("plan.M = \n", "<syntax>"),
])
def test_validation_names_key(text, key):
    with pytest.raises(ConfigError) as info:
        loads(text)
    assert info.value.key == key
    assert key in str(info.value)


def test_bad_config_exit_code(tmp_path, capsys):
    assert run(tmp_path, "spectrum", config_text="plan.M = 3\n") == cli.EXIT_CONFIG
    assert "plan.M" in capsys.readouterr().err
    assert cli.main(["spectrum", "--config", str(tmp_path / "missing.toml")]) == cli.EXIT_CONFIG


def test_spectrum_default(tmp_path):
    assert run(tmp_path, "spectrum") == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    by_q = {int(r["q"]): r for r in rows}
    assert round(float(by_q[-5]["rel_db"]), 2) == -13.98
    assert by_q[1]["rel_db"] == "0.000000"
    assert len(rows) == 2 * 97 + 1


def test_spectrum_qmax_one(tmp_path):
    assert run(tmp_path, "spectrum", config_text="simulation.q_max = 1\n") == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert [int(r["q"]) for r in rows] == [-1, 0, 1]
    assert [r["q"] for r in rows if r["is_null"] == "0"] == ["1"]


def test_delays_table_one(tmp_path):
    text = 'geometry.convention = "one_based"\ngeometry.spacing = 0.25\n'
    assert run(tmp_path, "delays", config_text=text) == 0
    assert (tmp_path / "delays.csv").read_text() == (GOLDEN / "delays_quarterwave_k2.csv").read_text()
    rows = read_csv(tmp_path / "delays.csv")
    ns = [[int(r["delay_ns"]) for r in rows if r["m"] == str(m)] for m in range(1, 5)]
    assert ns == [[500, 1000, 1500, 2000], [417, 833, 1250, 1667],
                  [357, 714, 1071, 1429], [313, 625, 938, 1250]]


def test_delays_halfwave(tmp_path):
    assert run(tmp_path, "delays") == 0
    assert (tmp_path / "delays.csv").read_text() == (GOLDEN / "delays_halfwave_k2.csv").read_text()
    rows = read_csv(tmp_path / "delays.csv")
    assert [int(r["delay_ns"]) for r in rows if r["m"] == "1"] == [0, 1000, 2000, 3000]


def test_delays_broadside_all_slots(tmp_path):
    assert run(tmp_path, "delays", config_text="steering.theta0_deg = 0.0\ndelays.k = 0\n") == 0
    rows = read_csv(tmp_path / "delays.csv")
    assert len(rows) == 4 * 6 * 4
    assert all(r["delay_ns"] == "0" for r in rows)


def test_pattern_default(tmp_path):
    assert run(tmp_path, "pattern") == 0
    rows = read_csv(tmp_path / "pattern.csv")
    best = max(rows, key=lambda r: float(r["power_db"]))
    assert abs(float(best["theta_deg"]) - 30.0) <= 0.05
    assert len(rows) == 3601


def test_budget_default(tmp_path):
    assert run(tmp_path, "budget") == 0
    text = (tmp_path / "budget.txt").read_text()
    lines = text.splitlines()
    assert lines[1].split() == ["conventional", "M=4", "12N=48", "11.2"]
    assert lines[2].split() == ["tma", "1", "6N=24", "3.4"]
    assert lines[3].split() == ["delta", "-7.8"]


def test_timeline_golden(tmp_path):
    assert run(tmp_path, "timeline") == 0
    assert (tmp_path / "timeline.txt").read_text() == (GOLDEN / "timeline_default.txt").read_text()


def test_schedule(tmp_path):
    assert run(tmp_path, "schedule", "--seed", "42") == 0
    rows = read_csv(tmp_path / "schedule.csv")
    assert len(rows) == 32
    assert [int(r["k"]) for r in rows[::4]] == [4, 2, 3, 4, 5, 1, 1, 1]


def test_ber_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    text = "simulation.n_trials = 10000\nsimulation.ebn0_db = [0, 4, 8]\n"
    for d in (a, b):
        d.mkdir()
        assert run(d, "ber", "--seed", "7", "--scheme", "conventional", config_text=text) == 0
    assert (a / "ber.csv").read_text() == (b / "ber.csv").read_text()
    rows = read_csv(a / "ber.csv")
    assert [r["scheme"] for r in rows] == ["conventional"] * 3


def test_ber_both_schemes(tmp_path):
    assert run(tmp_path, "ber", config_text="simulation.n_trials = 1000\nsimulation.ebn0_db = [0]\n") == 0
    assert [r["scheme"] for r in read_csv(tmp_path / "ber.csv")] == ["conventional", "tma"]


def test_numeric_precondition_exit(tmp_path):
    text = "simulation.n_trials = 1000\nsimulation.sample_rate = 1e6\n"
    assert run(tmp_path, "ber", config_text=text) == cli.EXIT_NUMERIC


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    assert cli.main(["budget"]) == 0
    assert (tmp_path / "envout" / "budget.txt").exists()
    # explicit flag wins
    assert cli.main(["budget", "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "budget.txt").exists()


def test_load_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(dumps(default_config()))
    assert load(p) == default_config()


def test_replace_keeps_validation():
    with pytest.raises(ConfigError):
        default_config().replace(plan__M=5)
    assert default_config().replace(simulation__seed=3)["simulation.seed"] == 3


def test_idempotent_runs(tmp_path):
    for cmd, name in [("spectrum", "spectrum.csv"), ("pattern", "pattern.csv"), ("timeline", "timeline.txt")]:
        assert run(tmp_path, cmd) == 0
        first = (tmp_path / name).read_text()
        assert run(tmp_path, cmd) == 0
        assert (tmp_path / name).read_text() == first
