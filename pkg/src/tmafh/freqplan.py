"""FH-MFSK frequency lattice, slow-hop timing and hop-pattern generation."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

# 64-bit LCG (Knuth MMIX constants).  Pinned: changing these breaks the
# golden hop vectors.
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class FrequencyPlan:
    """Carrier, tone spacing and hop structure.

    The hop spacing is always ``M * delta_fsk``; there is no separate knob.
    """

    f_c: float = 2.5e9
    delta_fsk: float = 50e3
    M: int = 4
    K: int = 6
    L: int = 4
    T_s: float = 1e-3

    def __post_init__(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ValueError(f"M must be a power of two >= 2, got {self.M}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if not self.delta_fsk > 0:
            raise ValueError(f"delta_fsk must be positive, got {self.delta_fsk}")
        if not self.T_s > 0:
            raise ValueError(f"T_s must be positive, got {self.T_s}")
        if not self.f_c > 0:
            raise ValueError(f"f_c must be positive, got {self.f_c}")

    @property
    def delta_fh(self) -> float:
        return self.M * self.delta_fsk

    @property
    def T_h(self) -> float:
        return self.L * self.T_s

    @property
    def bandwidth(self) -> float:
        """Total hopped bandwidth ``K * M * delta_fsk``."""
        return self.K * self.M * self.delta_fsk

    @property
    def bits_per_symbol(self) -> int:
        return self.M.bit_length() - 1

    @property
    def max_offset(self) -> float:
        return tx_offset(self, self.M, self.K)


def tx_offset(plan: FrequencyPlan, m: int, k: int) -> float:
    """Transmit frequency above the carrier for symbol ``m`` in hop slot ``k``.

    Both indices are 1-based: ``[m + (k - 1) M] * delta_fsk``.  This is also
    the fundamental of the modulating waveform.
    """
    if not 1 <= m <= plan.M:
        raise ValueError(f"symbol index m={m} outside 1..{plan.M}")
    if not 1 <= k <= plan.K:
        raise ValueError(f"hop index k={k} outside 1..{plan.K}")
    return (m + (k - 1) * plan.M) * plan.delta_fsk


def lcg_next(state: int) -> int:
    return (LCG_MULTIPLIER * state + LCG_INCREMENT) & _MASK64


def hop_pattern(plan: FrequencyPlan, n_hops: int, seed: int) -> List[int]:
    """Pseudo-random hop slots in 1..K.

    Each draw advances the LCG once and maps the upper 32 bits onto 1..K by
    multiply-shift: ``k = 1 + ((state >> 32) * K >> 32)``.
    """
    if n_hops < 0:
        raise ValueError(f"n_hops must be >= 0, got {n_hops}")
    state = int(seed) & _MASK64
    out = []
    for _ in range(n_hops):
        state = lcg_next(state)
        out.append(1 + (((state >> 32) * plan.K) >> 32))
    return out


@dataclass(frozen=True)
class ScheduleEntry:
    index: int
    m: int
    k: int
    start_time: float


@dataclass(frozen=True)
class Schedule:
    entries: Tuple[ScheduleEntry, ...]
    seed: int
    T_s: float

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def span(self) -> float:
        return len(self.entries) * self.T_s

    @property
    def symbols(self) -> List[int]:
        return [e.m for e in self.entries]

    @property
    def hops(self) -> List[int]:
        return [e.k for e in self.entries]


def bits_to_symbols(bits: Sequence[int], M: int) -> List[int]:
    """Group bits MSB-first into 1-based symbol indices."""
    b = M.bit_length() - 1
    bits = [int(x) for x in bits]
    if len(bits) % b:
        raise ValueError(f"{len(bits)} bits is not a multiple of log2(M)={b}")
    if any(x not in (0, 1) for x in bits):
        raise ValueError("bits must be 0 or 1")
    symbols = []
    for i in range(0, len(bits), b):
        v = 0
        for x in bits[i:i + b]:
            v = (v << 1) | x
        symbols.append(v + 1)
    return symbols


def symbols_to_bits(symbols: Sequence[int], M: int) -> List[int]:
    b = M.bit_length() - 1
    out = []
    for m in symbols:
        v = int(m) - 1
        out.extend((v >> (b - 1 - j)) & 1 for j in range(b))
    return out


def build_schedule(plan: FrequencyPlan, bits: Sequence[int], seed: int) -> Schedule:
    """Map a bit stream onto (m, k, start time) entries.

    Every hop covers ``L`` consecutive symbols; a final partial hop is kept.
    """
    symbols = bits_to_symbols(bits, plan.M)
    n_hops = math.ceil(len(symbols) / plan.L)
    hops = hop_pattern(plan, n_hops, seed)
    entries = tuple(
        ScheduleEntry(i, m, hops[i // plan.L], i * plan.T_s)
        for i, m in enumerate(symbols)
    )
    return Schedule(entries, int(seed), plan.T_s)


def random_bits(n_bits: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2, size=n_bits, dtype=np.int8)


SCHEDULE_FIELDS = ("index", "m", "k", "start_s", "offset_hz")


def write_schedule_csv(path, plan: FrequencyPlan, schedule: Schedule) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCHEDULE_FIELDS)
        for e in schedule:
            writer.writerow([e.index, e.m, e.k, repr(e.start_time),
                             repr(tx_offset(plan, e.m, e.k))])
