"""Command-line front end: ``tmafh <subcommand> [--config F] [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 numerical precondition.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import array as arr
from . import config as cfgmod
from . import freqplan, link, timeline, waveform

OUT_ENV = "TMAFH_OUT"
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def cmd_spectrum(cfg, out: Path) -> Path:
    w = waveform.LptmWaveform(freqplan.tx_offset(cfg.plan, 1, 1))
    spec = waveform.spectrum(w, cfg["simulation.q_max"])
    _check_dft(w, spec, cfg["simulation.samples_per_period"])
    path = out / "spectrum.csv"
    waveform.write_spectrum_csv(path, spec)
    return path


def _check_dft(w, spec, samples_per_period):
    # sampled-period DFT, corrected for the stair-step hold, must match
    s = samples_per_period // waveform.N_LEVELS
    x = waveform.sample_period(w, s)
    X = np.fft.fft(x) / x.size
    n = x.size
    for c in spec.coefficients:
        if c.is_null or abs(c.q) >= n // 2:
            continue
        q = c.q
        hold = np.sin(np.pi * q / 6) / (s * np.sin(np.pi * q / n)) * np.exp(-1j * np.pi * q * (s - 1) / n)
        ideal = np.sin(np.pi * q / 6) / (np.pi * q / 6)
        est = X[q % n] / hold * ideal * np.exp(-1j * np.pi * q / 6)
        if abs(est - c.value) > 1e-9 * max(abs(c.value), 1e-3):
            raise ArithmeticError(f"sampled spectrum disagrees at q={q}")


def cmd_delays(cfg, out: Path) -> Path:
    table = arr.solve_delay_table(cfg.geometry, cfg.plan, cfg.theta0)
    k = cfg["delays.k"]
    if k:
        table = {mk: d for mk, d in table.items() if mk[1] == k}
    path = out / "delays.csv"
    arr.write_delays_csv(path, table)
    return path


def cmd_pattern(cfg, out: Path) -> Path:
    plan, geom = cfg.plan, cfg.geometry
    f = freqplan.tx_offset(plan, cfg["pattern.m"], cfg["pattern.k"])
    sched = arr.solve_delays(geom, cfg.theta0, f)
    deg = arr.theta_grid_deg(cfg["pattern.step_deg"])
    p = arr.pattern_db(geom, sched, np.radians(deg))
    path = out / "pattern.csv"
    arr.write_pattern_csv(path, deg, p)
    return path


def cmd_ber(cfg, out: Path, scheme=None) -> Path:
    schemes = [scheme] if scheme else list(link.SCHEMES)
    fs = cfg["simulation.sample_rate"] or None
    points = []
    for s in schemes:
        points += link.ber_curve(
            cfg.plan, cfg.geometry, cfg.theta0, cfg["simulation.ebn0_db"],
            cfg["simulation.n_trials"], cfg["simulation.seed"], s,
            sample_rate=fs, link_budget=cfg.budget, workers=cfg["simulation.workers"])
    path = out / "ber.csv"
    link.write_ber_csv(path, points)
    return path


def cmd_timeline(cfg, out: Path) -> Path:
    plan, geom = cfg.plan, cfg.geometry
    f = freqplan.tx_offset(plan, cfg["timeline.m"], cfg["timeline.k"])
    window = cfg["timeline.window_s"] or 1.0 / f
    sched = arr.solve_delays(geom, cfg.theta0, f)
    segments = []
    for n, w in enumerate(sched.waveforms(), start=1):
        segments += timeline.build_timeline(w, window, element=n)
    path = out / "timeline.txt"
    timeline.write_timeline(path, segments)
    return path


def cmd_budget(cfg, out: Path) -> Path:
    path = out / "budget.txt"
    path.write_text(link.budget_report(cfg.budget, cfg["plan.M"], cfg.geometry.N))
    return path


def cmd_schedule(cfg, out: Path) -> Path:
    plan = cfg.plan
    seed = cfg["simulation.seed"]
    bits = freqplan.random_bits(cfg["simulation.n_bits"], seed)
    sched = freqplan.build_schedule(plan, bits, seed)
    path = out / "schedule.csv"
    freqplan.write_schedule_csv(path, plan, sched)
    return path


COMMANDS = {
    "spectrum": cmd_spectrum,
    "delays": cmd_delays,
    "pattern": cmd_pattern,
    "ber": cmd_ber,
    "timeline": cmd_timeline,
    "budget": cmd_budget,
    "schedule": cmd_schedule,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tmafh", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="dotted-key TOML run description")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--seed", type=int, help="override simulation.seed")
    p.add_argument("--scheme", choices=link.SCHEMES, help="ber: simulate one scheme only")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(args.config) if args.config else cfgmod.default_config()
        if args.seed is not None:
            cfg = cfg.replace(simulation__seed=args.seed)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or Path(os.environ.get(OUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "ber":
            path = cmd_ber(cfg, out, args.scheme)
        else:
            path = COMMANDS[args.command](cfg, out)
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
