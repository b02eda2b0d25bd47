"""Six-level linear-phase time-modulating (LP-TM) waveform.

One period of the waveform is a stair-step of six unit-modulus segments of
length ``T/6`` whose phases are ``0, 60, ..., 300`` degrees.  Only the
harmonic orders ``q = 6i + 1`` survive, which is what makes the array
single-sideband.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

N_LEVELS = 6
DEFAULT_Q_MAX = 97

# Positions within this fraction of a segment from a boundary snap onto it,
# so boundary samples land in the later segment despite float rounding.
_SNAP = 1e-9


def in_psi(q: int) -> bool:
    """True if harmonic order ``q`` belongs to {6i + 1}."""
    return (q - 1) % N_LEVELS == 0


def fourier_coefficient(q: int) -> complex:
    """Exact Fourier-series coefficient of the undelayed stair-step.

    ``H_q = (6 / (pi q)) sin(pi q / 6) exp(-j pi q / 6)`` for ``q = 6i + 1``
    and exactly ``0`` otherwise.  The phase term follows from segment ``l``
    occupying ``[l T/6, (l+1) T/6)``.
    """
    q = int(q)
    if not in_psi(q):
        return 0j
    x = math.pi * q / N_LEVELS
    mag = math.sin(x) / x
    return complex(mag * math.cos(x), -mag * math.sin(x))


def efficiency() -> float:
    """Fraction of the power carried by the ``q = 1`` harmonic.

    ``(6/pi * sin(pi/6))^2 = (3/pi)^2``; written without the sine so the value
    is the correctly rounded ``(3/pi)^2``.
    """
    return (3.0 / math.pi) ** 2


def parseval_check(q_max: int) -> float:
    """Partial sum of ``|H_q|^2`` over ``q`` in Psi with ``|q| <= q_max``.

    Tends to 1 (unit-modulus waveform) and is nondecreasing in ``q_max``.
    """
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    # q = 6i + 1 with |q| <= q_max
    i_lo = math.ceil((-q_max - 1) / N_LEVELS)
    i_hi = (q_max - 1) // N_LEVELS
    q = N_LEVELS * np.arange(i_lo, i_hi + 1, dtype=np.float64) + 1.0
    x = np.pi * q / N_LEVELS
    terms = (np.sin(x) / x) ** 2
    # sum small terms first
    return float(np.sum(np.sort(terms)))


@dataclass(frozen=True)
class LptmWaveform:
    """Periodic six-level stair-step with fundamental ``f_tma`` and a delay.

    The delay is reduced into ``[0, 1/f_tma)`` at construction.
    """

    f_tma: float
    delay: float = 0.0
    n_levels: int = field(default=N_LEVELS)

    def __post_init__(self):
        if not (self.f_tma > 0 and math.isfinite(self.f_tma)):
            raise ValueError(f"f_tma must be positive and finite, got {self.f_tma}")
        if self.n_levels != N_LEVELS:
            raise ValueError("only six-level waveforms are supported")
        # reduce in units of periods, snapping full periods to zero
        u = (self.delay * self.f_tma) % 1.0
        if u > 1.0 - _SNAP / N_LEVELS:
            u = 0.0
        object.__setattr__(self, "delay", u / self.f_tma)

    @property
    def period(self) -> float:
        return 1.0 / self.f_tma


def shifted_coefficient(q: int, w: LptmWaveform) -> complex:
    """Coefficient of the delayed waveform, ``H_q exp(-j 2 pi q f_tma delay)``."""
    h = fourier_coefficient(q)
    if h == 0:
        return 0j
    # phase in cycles, reduced before scaling by 2 pi
    cycles = (q * w.f_tma * w.delay) % 1.0
    return h * complex(math.cos(2 * math.pi * cycles), -math.sin(2 * math.pi * cycles))


def segment_index(w: LptmWaveform, t) -> np.ndarray:
    """Phase-step index ``l`` in 0..5 active at time(s) ``t``."""
    u = (np.asarray(t, dtype=np.float64) - w.delay) * w.f_tma
    x = N_LEVELS * (u - np.floor(u))
    r = np.rint(x)
    x = np.where(np.abs(x - r) < _SNAP, r, x)
    return np.floor(x).astype(np.int64) % N_LEVELS


_PHASORS = np.exp(2j * np.pi * np.arange(N_LEVELS) / N_LEVELS)
# exact values on the axis
_PHASORS[0] = 1.0 + 0.0j
_PHASORS[3] = -1.0 + 0.0j


def phase_phasor(state) -> np.ndarray:
    """Unit phasor ``exp(j 2 pi state / 6)`` for integer state(s)."""
    return _PHASORS[np.asarray(state) % N_LEVELS]


def sample_waveform(w: LptmWaveform, t):
    """Evaluate the stair-step at time(s) ``t`` (seconds).

    Returns a complex scalar for scalar ``t``, else an array.
    """
    out = phase_phasor(segment_index(w, t))
    if np.ndim(t) == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class FourierCoefficient:
    q: int
    value: complex
    is_null: bool = False


@dataclass(frozen=True)
class Spectrum:
    coefficients: List[FourierCoefficient]
    reference_q: int = 1

    def _ref_mag(self) -> float:
        return abs(fourier_coefficient(self.reference_q))

    def rel_db(self, q: int) -> Optional[float]:
        """Level of order ``q`` in dB relative to ``reference_q``; None for nulls."""
        c = self[q]
        if c.is_null:
            return None
        return 20.0 * math.log10(abs(c.value) / self._ref_mag())

    def __getitem__(self, q: int) -> FourierCoefficient:
        for c in self.coefficients:
            if c.q == q:
                return c
        raise KeyError(q)

    @property
    def orders(self) -> List[int]:
        return [c.q for c in self.coefficients]

    def nonnull_orders(self) -> List[int]:
        return [c.q for c in self.coefficients if not c.is_null]


def spectrum(w: LptmWaveform, q_max: int = DEFAULT_Q_MAX) -> Spectrum:
    """Coefficients of ``w`` for ``q`` in ``[-q_max, q_max]``, normalized to q=1."""
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    coeffs = []
    for q in range(-q_max, q_max + 1):
        if in_psi(q):
            coeffs.append(FourierCoefficient(q, shifted_coefficient(q, w)))
        else:
            coeffs.append(FourierCoefficient(q, 0j, is_null=True))
    return Spectrum(coeffs)


def sample_period(w: LptmWaveform, samples_per_segment: int) -> np.ndarray:
    """One period sampled on a grid of ``6 * samples_per_segment`` points from t=0."""
    n = N_LEVELS * samples_per_segment
    # integer grid avoids drift; time = i / (n f_tma)
    t = np.arange(n) / (n * w.f_tma)
    return sample_waveform(w, t)


SPECTRUM_FIELDS = ("q", "re", "im", "mag", "rel_db", "is_null")


def spectrum_rows(spec: Spectrum) -> Iterable[dict]:
    for c in spec.coefficients:
        rel = spec.rel_db(c.q)
        yield {
            "q": c.q,
            "re": repr(c.value.real),
            "im": repr(c.value.imag),
            "mag": repr(abs(c.value)),
            "rel_db": "" if rel is None else f"{rel:.6f}",
            "is_null": int(c.is_null),
        }


def write_spectrum_csv(path, spec: Spectrum) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SPECTRUM_FIELDS)
        writer.writeheader()
        writer.writerows(spectrum_rows(spec))
