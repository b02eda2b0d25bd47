"""Linear time-modulated array: steering delays, array factors, radiated signal.

Element positions are expressed in carrier wavelengths throughout.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .freqplan import FrequencyPlan, Schedule, tx_offset
from .waveform import (
    LptmWaveform,
    fourier_coefficient,
    in_psi,
    phase_phasor,
    segment_index,
)

CONVENTIONS = ("zero_based", "one_based", "custom")
DEFAULT_GRID_STEP_DEG = 0.05


class UndersampledError(ValueError):
    """Sample rate too low for the requested harmonic content."""


@dataclass(frozen=True)
class ArrayGeometry:
    positions: Tuple[float, ...]
    convention: str = "custom"
    spacing: Optional[float] = None

    def __post_init__(self):
        pos = tuple(float(z) for z in self.positions)
        object.__setattr__(self, "positions", pos)
        if not pos:
            raise ValueError("array needs at least one element")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("element positions must be strictly increasing")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")

    @classmethod
    def uniform(cls, n: int, spacing: float = 0.5, convention: str = "zero_based"):
        """``n`` elements ``spacing`` wavelengths apart.

        ``zero_based`` puts element n at ``(n-1) d``, ``one_based`` at ``n d``.
        """
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        if not spacing > 0:
            raise ValueError(f"spacing must be positive, got {spacing}")
        if convention == "zero_based":
            pos = [i * spacing for i in range(n)]
        elif convention == "one_based":
            pos = [(i + 1) * spacing for i in range(n)]
        else:
            raise ValueError(f"uniform arrays are zero_based or one_based, not {convention!r}")
        return cls(tuple(pos), convention, spacing)

    @property
    def N(self) -> int:
        return len(self.positions)

    @property
    def z(self) -> np.ndarray:
        return np.asarray(self.positions)


@dataclass(frozen=True)
class DelaySchedule:
    delays: Tuple[float, ...]
    f_tma: float
    theta0: float

    def __post_init__(self):
        object.__setattr__(self, "delays", tuple(float(d) for d in self.delays))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.delays)

    def waveforms(self):
        return [LptmWaveform(self.f_tma, d) for d in self.delays]

    def delays_ns(self) -> list:
        return [round_half_up_ns(d) for d in self.delays]


def round_half_up_ns(seconds: float) -> int:
    # tolerance keeps 937.4999999999998 ns -> 938
    return int(math.floor(seconds * 1e9 + 0.5 + 1e-6))


def solve_delays(geom: ArrayGeometry, theta0: float, f_tma: float) -> DelaySchedule:
    """Per-element delays that point the q=1 beam at ``theta0`` (radians).

    ``D_n = frac(z_n sin theta0) / f_tma``, so every delay lies in one period.
    """
    if abs(theta0) > math.pi / 2 + 1e-12:
        raise ValueError(f"|theta0| must be <= pi/2, got {theta0}")
    if not f_tma > 0:
        raise ValueError(f"f_tma must be positive, got {f_tma}")
    frac = np.mod(geom.z * math.sin(theta0), 1.0)
    frac[frac > 1.0 - 1e-12] = 0.0
    return DelaySchedule(tuple(frac / f_tma), f_tma, theta0)


def solve_delay_table(geom: ArrayGeometry, plan: FrequencyPlan,
                      theta0: float) -> Dict[Tuple[int, int], DelaySchedule]:
    """Delays for every (m, k) pair of the plan."""
    return {
        (m, k): solve_delays(geom, theta0, tx_offset(plan, m, k))
        for k in range(1, plan.K + 1)
        for m in range(1, plan.M + 1)
    }


def _spatial_phasors(geom: ArrayGeometry, theta) -> np.ndarray:
    # shape (..., N)
    s = np.sin(np.asarray(theta, dtype=np.float64))[..., None]
    return np.exp(2j * np.pi * geom.z * s)


def _delay_phasors(sched: DelaySchedule, q: int = 1) -> np.ndarray:
    cycles = np.mod(q * sched.f_tma * sched.array, 1.0)
    return np.exp(-2j * np.pi * cycles)


def array_factor(geom: ArrayGeometry, sched: DelaySchedule, theta):
    """``sum_n exp(j 2 pi (z_n sin theta - f_tma D_n))`` at angle(s) theta."""
    af = _spatial_phasors(geom, theta) @ _delay_phasors(sched)
    if np.ndim(theta) == 0:
        return complex(af)
    return af


def _to_db(x, ref):
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(np.abs(x) / ref)


def pattern_db(geom: ArrayGeometry, sched: DelaySchedule, theta_grid) -> np.ndarray:
    """Relative power pattern ``20 log10(|AF| / N)`` evaluated from the delays."""
    return _to_db(array_factor(geom, sched, np.asarray(theta_grid)), geom.N)


def steered_pattern(geom: ArrayGeometry, theta0: float, theta_grid) -> np.ndarray:
    """Closed-form steered pattern ``|sum_n exp(j 2 pi z_n (sin t - sin t0))| / N`` in dB."""
    theta_grid = np.asarray(theta_grid, dtype=np.float64)
    if theta_grid.size == 0:
        raise ValueError("theta grid is empty")
    u = np.sin(theta_grid) - math.sin(theta0)
    af = np.exp(2j * np.pi * np.outer(u, geom.z)).sum(axis=1)
    return _to_db(af, geom.N)


def harmonic_pattern(geom: ArrayGeometry, sched: DelaySchedule, q: int,
                     theta_grid) -> np.ndarray:
    """Beam of harmonic ``q`` in dB relative to the ideal q=1 peak ``N |H_1|``."""
    if not in_psi(q):
        raise ValueError(f"harmonic order {q} carries no power (not 6i+1)")
    hq = fourier_coefficient(q)
    s = _spatial_phasors(geom, np.asarray(theta_grid)) @ _delay_phasors(sched, q)
    return _to_db(hq * s, geom.N * abs(fourier_coefficient(1)))


def theta_grid_deg(step: float = DEFAULT_GRID_STEP_DEG, lo: float = -90.0,
                   hi: float = 90.0) -> np.ndarray:
    """Uniform grid in degrees including both end points."""
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def required_sample_rate(f_max: float, q_max: int) -> float:
    """Minimum rate for harmonics up to ``|q| <= q_max`` of a ``f_max`` fundamental."""
    q_top = max(abs(q) for q in range(-q_max, q_max + 1) if in_psi(q))
    return 4.0 * q_top * f_max


def _symbol_block(geom, f_tma, delays, tau, spatial, exact=True):
    """Sum over elements for one symbol; ``tau`` is time since symbol start."""
    out = np.zeros(tau.shape, dtype=np.complex128)
    for n, d in enumerate(delays):
        w_n = LptmWaveform(f_tma, d)
        if exact:
            h = phase_phasor(segment_index(w_n, tau))
        else:
            cycles = np.mod(f_tma * (tau - w_n.delay), 1.0)
            h = fourier_coefficient(1) * np.exp(2j * np.pi * cycles)
        out += h * spatial[n]
    return out


def _synthesize(geom, plan, schedule, delays, theta, sample_rate, duration,
                q_max, exact):
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    if duration > schedule.span * (1 + 1e-12):
        raise ValueError(f"duration {duration} exceeds schedule span {schedule.span}")
    n_total = int(round(duration * sample_rate))
    if schedule.entries:
        f_max = max(tx_offset(plan, e.m, e.k) for e in schedule)
        need = required_sample_rate(f_max, q_max)
        if sample_rate < need * (1 - 1e-12):
            raise UndersampledError(
                f"sample rate {sample_rate:g} Hz below {need:g} Hz needed for q_max={q_max}")
    spatial = np.exp(2j * np.pi * geom.z * math.sin(theta))
    sps = plan.T_s * sample_rate
    out = np.empty(n_total, dtype=np.complex128)
    idx = np.arange(n_total)
    integral = abs(sps - round(sps)) < 1e-9
    if integral:
        sps = int(round(sps))
        sym_of = idx // sps
    else:
        sym_of = np.floor(idx / sps + 1e-9).astype(np.int64)
    for s in np.unique(sym_of):
        sel = sym_of == s
        e = schedule[int(s)]
        f = tx_offset(plan, e.m, e.k)
        if integral:
            tau = (idx[sel] - int(s) * sps) / sample_rate
        else:
            tau = idx[sel] / sample_rate - e.start_time
        out[sel] = _symbol_block(geom, f, delays[(e.m, e.k)].delays, tau,
                                 spatial, exact)
    return out


def radiated_signal(geom: ArrayGeometry, plan: FrequencyPlan, schedule: Schedule,
                    delays: Mapping[Tuple[int, int], DelaySchedule], theta: float,
                    sample_rate: float, duration: float, q_max: int = 7) -> np.ndarray:
    """Baseband samples radiated towards ``theta`` using the exact stair-steps.

    Each symbol restarts its waveforms at phase step 0 and uses the delays of
    its own (m, k).  ``q_max`` only sets the sampling-rate precondition; the
    waveform is never truncated.
    """
    return _synthesize(geom, plan, schedule, delays, theta, sample_rate,
                       duration, q_max, exact=True)


def first_harmonic_signal(geom, plan, schedule, delays, theta, sample_rate,
                          duration) -> np.ndarray:
    """Same as :func:`radiated_signal` keeping only the q=1 term of each element."""
    return _synthesize(geom, plan, schedule, delays, theta, sample_rate,
                       duration, 1, exact=False)


DELAY_FIELDS = ("m", "k", "n", "delay_ns")
PATTERN_FIELDS = ("theta_deg", "power_db")


def write_delays_csv(path, table: Mapping[Tuple[int, int], DelaySchedule]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DELAY_FIELDS)
        for (m, k) in sorted(table, key=lambda mk: (mk[1], mk[0])):
            for n, ns in enumerate(table[(m, k)].delays_ns(), start=1):
                writer.writerow([m, k, n, ns])


def _fmt_db(x: float) -> str:
    return "-inf" if np.isneginf(x) else f"{x:.6f}"


def write_pattern_csv(path, theta_deg: Sequence[float], power_db: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PATTERN_FIELDS)
        for t, p in zip(theta_deg, power_db):
            writer.writerow([f"{t:.4f}", _fmt_db(p)])
