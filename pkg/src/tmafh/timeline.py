"""Per-element switch-state timelines for the six-state feeding network.

A timeline tiles ``[0, window)`` with segments, each holding one phase state
(phase ``60 * state`` degrees).  Exported boundaries are integer picoseconds,
each computed directly from its index so long tables do not drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .waveform import N_LEVELS, LptmWaveform, phase_phasor, segment_index

_SNAP = 1e-9


class TimelineError(ValueError):
    """Timeline does not tile its window with a valid state cycle."""


def _switch_positions(state: int) -> Dict[str, int]:
    # phase = 120 deg * SP3T throw + 180 deg * SPDT throw (mod 360)
    spdt = state % 2
    sp3t = ((state - 3 * spdt) // 2) % 3
    return {"sp3t_in": sp3t, "sp3t_out": sp3t, "spdt_in": spdt, "spdt_out": spdt}


# state -> throw of each switch in the element's feeding network
SWITCH_TABLE = {s: _switch_positions(s) for s in range(N_LEVELS)}


@dataclass(frozen=True)
class SwitchSegment:
    element: int
    t_start: float
    t_end: float
    phase_state: int
    t_start_ps: int = 0
    t_end_ps: int = 0

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def phase_deg(self) -> int:
        return 60 * self.phase_state

    @property
    def switches(self) -> Dict[str, int]:
        return SWITCH_TABLE[self.phase_state]


def _ps(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_timeline(w: LptmWaveform, window: float, element: int = 1) -> List[SwitchSegment]:
    """Stair-step switch schedule of ``w`` over ``[0, window)``."""
    if not window > 0:
        raise ValueError(f"window must be positive, got {window}")
    f6 = N_LEVELS * w.f_tma
    # boundaries sit at integer x = (t - delay) * 6 f
    x0 = -w.delay * f6
    x1 = (window - w.delay) * f6
    b_lo = math.floor(x0 + _SNAP) + 1
    b_hi = math.ceil(x1 - _SNAP) - 1
    bounds = [(b / f6) + w.delay for b in range(b_lo, b_hi + 1)]
    t_ps = 1e12 / w.f_tma
    delay_ps = w.delay * 1e12
    bounds_ps = [_ps(delay_ps + b * t_ps / N_LEVELS) for b in range(b_lo, b_hi + 1)]

    edges = [0.0] + bounds + [float(window)]
    edges_ps = [0] + bounds_ps + [_ps(window * 1e12)]
    state = int(segment_index(w, 0.0))
    segments = []
    for i in range(len(edges) - 1):
        segments.append(SwitchSegment(element, edges[i], edges[i + 1],
                                      (state + i) % N_LEVELS,
                                      edges_ps[i], edges_ps[i + 1]))
    return segments


def validate_timeline(segments: Sequence[SwitchSegment]) -> None:
    if not segments:
        raise TimelineError("empty timeline")
    if len({s.element for s in segments}) != 1:
        raise TimelineError("timeline mixes several elements")
    if segments[0].t_start != 0.0:
        raise TimelineError(f"timeline starts at {segments[0].t_start}, not 0")
    for a, b in zip(segments, segments[1:]):
        if b.t_start > a.t_end:
            raise TimelineError(f"gap between {a.t_end} and {b.t_start}")
        if b.t_start < a.t_end:
            raise TimelineError(f"overlap between {b.t_start} and {a.t_end}")
        if b.phase_state != (a.phase_state + 1) % N_LEVELS:
            raise TimelineError(f"state {a.phase_state} followed by {b.phase_state}")
    for s in segments:
        if not s.t_end > s.t_start:
            raise TimelineError(f"empty segment at {s.t_start}")
        if not 0 <= s.phase_state < N_LEVELS:
            raise TimelineError(f"invalid phase state {s.phase_state}")


def timeline_to_waveform(segments: Sequence[SwitchSegment], t) -> np.ndarray:
    """Reconstruct the element's complex modulation at times ``t``."""
    validate_timeline(segments)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    starts = np.array([s.t_start for s in segments])
    ends = np.array([s.t_end for s in segments])
    states = np.array([s.phase_state for s in segments])
    if np.any(t < 0) or np.any(t >= ends[-1]):
        raise ValueError("sample times fall outside the timeline window")
    i = np.searchsorted(starts, t, side="right") - 1
    # points a hair before a boundary belong to the later segment
    nxt = np.minimum(i + 1, len(segments) - 1)
    seg = (ends - starts)[i]
    late = (nxt > i) & (starts[nxt] - t < _SNAP * seg)
    i = np.where(late, nxt, i)
    return phase_phasor(states[i])


TIMELINE_FIELDS = ("element", "t_start_ps", "t_end_ps", "phase_state", "phase_deg")


def timeline_text(segments: Sequence[SwitchSegment]) -> str:
    lines = [",".join(TIMELINE_FIELDS)]
    for s in segments:
        lines.append(f"{s.element},{s.t_start_ps},{s.t_end_ps},{s.phase_state},{s.phase_deg}")
    return "\n".join(lines) + "\n"


def write_timeline(path, segments: Sequence[SwitchSegment]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(timeline_text(segments))
