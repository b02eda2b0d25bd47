"""Link-level evaluation: insertion-loss budget, AWGN, noncoherent MFSK, BER."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import binomtest

from .array import ArrayGeometry, radiated_signal, required_sample_rate, solve_delays
from .freqplan import FrequencyPlan, Schedule, ScheduleEntry, tx_offset
from .waveform import efficiency, fourier_coefficient

SCHEMES = ("conventional", "tma")
BLOCK_TRIALS = 10_000
MIN_TRIALS = 1_000


@dataclass(frozen=True)
class LinkBudget:
    """Component insertion losses (dB) and the time-modulation efficiency."""

    mux: float = 0.7
    mixer: float = 4.5
    bpf: float = 2.0
    vps: float = 4.0
    spdt: float = 0.5
    tma_efficiency: float = field(default_factory=efficiency)

    def __post_init__(self):
        for name in ("mux", "mixer", "bpf", "vps", "spdt"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} loss must be >= 0 dB")
        if not 0 < self.tma_efficiency <= 1:
            raise ValueError("tma_efficiency must be in (0, 1]")


def budget(b: LinkBudget) -> Tuple[float, float, float]:
    """Return ``(eta_conv_db, eta_tma_db, delta_db)``.

    The conventional chain is MUX + mixer + BPF + VPS; the TMA chain pays the
    unused-harmonic power plus six SPDT passes.
    """
    conv = b.mux + b.mixer + b.bpf + b.vps
    tma = -10.0 * math.log10(b.tma_efficiency) + 6 * b.spdt
    return conv, tma, tma - conv


def switch_counts(N: int) -> Dict[str, int]:
    """SPDT switch counts: 6-bit VPS per element (12N) vs six-state TMFN (6N)."""
    return {"conventional": 12 * N, "tma": 6 * N}


def budget_report(b: LinkBudget, M: int, N: int) -> str:
    conv, tma, delta = budget(b)
    sw = switch_counts(N)
    rows = [
        ("scheme", "oscillators", "spdt_switches", "eta_db"),
        ("conventional", f"M={M}", f"12N={sw['conventional']}", f"{conv:.1f}"),
        ("tma", "1", f"6N={sw['tma']}", f"{tma:.1f}"),
        ("delta", "", "", f"{delta:.1f}"),
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    return "\n".join(
        "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows
    ) + "\n"


def awgn(samples, es_n0_db: float, seed: int, samples_per_symbol: int = 1,
         reference_power: Optional[float] = None) -> np.ndarray:
    """Add circular complex Gaussian noise.

    Symbol energy is ``samples_per_symbol * P`` with ``P`` the mean sample
    power (or ``reference_power``); the per-sample noise variance is set so
    that energy over noise density equals ``es_n0_db``.  ``+inf`` disables noise.
    """
    x = np.asarray(samples, dtype=np.complex128)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("samples must be a finite, nonempty stream")
    if es_n0_db == math.inf:
        return x.copy()
    p = float(np.mean(np.abs(x) ** 2)) if reference_power is None else reference_power
    var = p * samples_per_symbol / 10 ** (es_n0_db / 10)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + math.sqrt(var / 2) * noise


def tone_bank(plan: FrequencyPlan, k: int, sample_rate: float, n_samples: int) -> np.ndarray:
    """The ``M`` reference tones of hop slot ``k``, shape ``(M, n_samples)``."""
    t = np.arange(n_samples) / sample_rate
    f = np.array([tx_offset(plan, m, k) for m in range(1, plan.M + 1)])
    return np.exp(2j * np.pi * np.mod(np.outer(f, t), 1.0))


def samples_per_symbol(plan: FrequencyPlan, sample_rate: float) -> int:
    sps = plan.T_s * sample_rate
    if abs(sps - round(sps)) > 1e-6:
        raise ValueError(f"T_s * sample_rate = {sps} is not an integer")
    return int(round(sps))


def correlate_mfsk(rx, plan: FrequencyPlan, k: int, sample_rate: float) -> np.ndarray:
    """Normalized correlator outputs against the slot-``k`` tones (last axis M)."""
    rx = np.asarray(rx, dtype=np.complex128)
    ns = samples_per_symbol(plan, sample_rate)
    if rx.shape[-1] != ns:
        raise ValueError(f"expected {ns} samples per symbol, got {rx.shape[-1]}")
    return rx @ tone_bank(plan, k, sample_rate, ns).conj().T / ns


def demod_mfsk(rx, plan: FrequencyPlan, k: int, sample_rate: float):
    """Noncoherent energy detection over one symbol; returns 1-based ``m``.

    ``rx`` may be 2-D ``(n_symbols, samples)``.  Ties go to the smaller m.
    """
    energy = np.abs(correlate_mfsk(rx, plan, k, sample_rate)) ** 2
    m = np.argmax(energy, axis=-1) + 1
    return int(m) if np.ndim(m) == 0 else m


def theoretical_ser(M: int, es_n0: float) -> float:
    """Symbol error probability of noncoherent orthogonal M-FSK in AWGN."""
    if M < 2 or M & (M - 1):
        raise ValueError(f"M must be a power of two >= 2, got {M}")
    if es_n0 < 0:
        raise ValueError("es_n0 must be >= 0")
    return sum(
        (-1) ** (i + 1) * math.comb(M - 1, i) / (i + 1) * math.exp(-i * es_n0 / (i + 1))
        for i in range(1, M)
    )


def theoretical_ber(M: int, es_n0: float) -> float:
    return theoretical_ser(M, es_n0) * (M / 2) / (M - 1)


def theoretical_ber_ebn0(M: int, ebn0_db: float) -> float:
    bits = M.bit_length() - 1
    return theoretical_ber(M, bits * 10 ** (ebn0_db / 10))


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    ber_mc: float
    ber_theory: float
    n_trials: int
    scheme: str
    bit_errors: int = 0
    symbol_errors: int = 0
    n_bits: int = 0
    ci95: Tuple[float, float] = (0.0, 1.0)

    @property
    def sigma(self) -> float:
        """Binomial standard deviation of the BER estimate at the theory value."""
        p = self.ber_theory
        return math.sqrt(p * (1 - p) / self.n_trials)


def default_sample_rate(plan: FrequencyPlan, q_max: int = 7) -> float:
    """Smallest rate meeting the harmonic precondition with integer samples/symbol."""
    need = required_sample_rate(plan.max_offset, q_max)
    return math.ceil(need * plan.T_s - 1e-9) / plan.T_s


def _check_orthogonal(plan: FrequencyPlan):
    x = plan.delta_fsk * plan.T_s
    if x < 0.5 or abs(x - round(x)) > 1e-9:
        raise ValueError(f"delta_fsk * T_s = {x} must be a positive integer")


def symbol_templates(plan: FrequencyPlan, geom: ArrayGeometry, theta0: float,
                     scheme: str, sample_rate: float, delta_db: float = 0.0,
                     exclude_harmonic_energy: bool = False) -> np.ndarray:
    """Noiseless correlator outputs for every transmitted (m, k).

    Shape ``(K, M, M)``: ``[k-1, m-1, :]`` is the bank output for symbol m in
    slot k.  Conventional tones have unit amplitude.  TMA symbols are the
    exact stair-step array output at ``theta0`` scaled so that the q=1 tone
    amplitude (or, with ``exclude_harmonic_energy``, the total power) is
    ``10**(-delta_db/20)``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    ns = samples_per_symbol(plan, sample_rate)
    out = np.empty((plan.K, plan.M, plan.M), dtype=np.complex128)
    amp = 10 ** (-delta_db / 20)
    for k in range(1, plan.K + 1):
        bank = tone_bank(plan, k, sample_rate, ns).conj().T / ns
        for m in range(1, plan.M + 1):
            if scheme == "conventional":
                t = np.arange(ns) / sample_rate
                x = np.exp(2j * np.pi * np.mod(tx_offset(plan, m, k) * t, 1.0))
            else:
                sched = Schedule((ScheduleEntry(0, m, k, 0.0),), 0, plan.T_s)
                delays = {(m, k): solve_delays(geom, theta0, tx_offset(plan, m, k))}
                x = radiated_signal(geom, plan, sched, delays, theta0,
                                    sample_rate, plan.T_s)
                if exclude_harmonic_energy:
                    x = x * (amp / math.sqrt(np.mean(np.abs(x) ** 2)))
                else:
                    x = x * (amp / (geom.N * abs(fourier_coefficient(1))))
            out[k - 1, m - 1] = x @ bank
    return out


def _popcount_table(M: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(M)], dtype=np.int64)


def _run_block(templates, es_n0, n, seed_words, popcount):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed_words)))
    K, M, _ = templates.shape
    m = rng.integers(0, M, size=n)
    k = rng.integers(0, K, size=n)
    scale = math.sqrt(1.0 / (2.0 * es_n0))
    noise = rng.standard_normal((n, M)) + 1j * rng.standard_normal((n, M))
    z = templates[k, m] + scale * noise
    m_hat = np.argmax(np.abs(z) ** 2, axis=1)
    return int(np.count_nonzero(m_hat != m)), int(popcount[m_hat ^ m].sum())


def ber_curve(plan: FrequencyPlan, geom: ArrayGeometry, theta0: float,
              ebn0_grid: Sequence[float], n_trials: int, seed: int,
              scheme: str = "conventional", *, sample_rate: Optional[float] = None,
              link_budget: Optional[LinkBudget] = None,
              exclude_harmonic_energy: bool = False,
              workers: int = 1) -> List[BerPoint]:
    """Monte Carlo BER of noncoherent MFSK versus conventional-scheme Eb/N0.

    Noiseless symbols are synthesized once per (m, k) and projected onto the
    orthogonal tone bank; each trial then draws a random symbol, hop slot and
    i.i.d. correlator noise, which is the exact sufficient statistic of the
    sampled AWGN channel.  For ``scheme="tma"`` the received level is raised
    by the budget's insertion-loss advantage.

    Trials are split into blocks of ``BLOCK_TRIALS`` seeded by
    ``SeedSequence([seed, scheme_index, grid_index, block_index])``, so the
    result does not depend on ``workers``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    grid = [float(g) for g in ebn0_grid]
    if not grid or not all(math.isfinite(g) for g in grid):
        raise ValueError("ebn0 grid must be nonempty and finite")
    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_TRIALS}, got {n_trials}")
    _check_orthogonal(plan)
    fs = default_sample_rate(plan) if sample_rate is None else sample_rate
    delta = 0.0
    if scheme == "tma":
        delta = budget(link_budget or LinkBudget())[2]
    templates = symbol_templates(plan, geom, theta0, scheme, fs, delta,
                                 exclude_harmonic_energy)
    useful = float(np.mean([
        abs(templates[k, m, m]) ** 2 for k in range(plan.K) for m in range(plan.M)
    ]))
    bits = plan.bits_per_symbol
    popcount = _popcount_table(plan.M)
    scheme_id = SCHEMES.index(scheme)

    tasks = []
    for g, ebn0_db in enumerate(grid):
        es_n0 = bits * 10 ** (ebn0_db / 10)
        for b, start in enumerate(range(0, n_trials, BLOCK_TRIALS)):
            n = min(BLOCK_TRIALS, n_trials - start)
            tasks.append((g, es_n0, n, [int(seed), scheme_id, g, b]))

    def run(task):
        g, es_n0, n, words = task
        return g, _run_block(templates, es_n0, n, words, popcount)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    sym_err = [0] * len(grid)
    bit_err = [0] * len(grid)
    for g, (se, be) in results:
        sym_err[g] += se
        bit_err[g] += be

    points = []
    n_bits = n_trials * bits
    for g, ebn0_db in enumerate(grid):
        es_n0 = bits * 10 ** (ebn0_db / 10)
        ci = binomtest(bit_err[g], n_bits).proportion_ci(0.95, method="wilson")
        points.append(BerPoint(
            ebn0_db=ebn0_db,
            ber_mc=bit_err[g] / n_bits,
            ber_theory=theoretical_ber(plan.M, es_n0 * useful),
            n_trials=n_trials,
            scheme=scheme,
            bit_errors=bit_err[g],
            symbol_errors=sym_err[g],
            n_bits=n_bits,
            ci95=(float(ci.low), float(ci.high)),
        ))
    return points


def ebn0_at_ber(points: Sequence[BerPoint], target: float, field_name: str = "ber_mc") -> float:
    """Eb/N0 where the curve first crosses ``target``, interpolating log10(BER)."""
    xs = [p.ebn0_db for p in points]
    ys = [getattr(p, field_name) for p in points]
    for i in range(len(xs) - 1):
        y0, y1 = ys[i], ys[i + 1]
        if y0 >= target > y1:
            if y1 <= 0:
                return xs[i + 1]
            l0, l1, lt = math.log10(y0), math.log10(y1), math.log10(target)
            return xs[i] + (lt - l0) * (xs[i + 1] - xs[i]) / (l1 - l0)
    raise ValueError(f"curve does not cross BER {target}")


BER_FIELDS = ("scheme", "ebn0_db", "ber_mc", "ber_theory", "n_trials", "ci95_lo", "ci95_hi")


def write_ber_csv(path, points: Sequence[BerPoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BER_FIELDS)
        for p in points:
            writer.writerow([p.scheme, f"{p.ebn0_db:g}", repr(p.ber_mc), repr(p.ber_theory),
                             p.n_trials, repr(p.ci95[0]), repr(p.ci95[1])])
