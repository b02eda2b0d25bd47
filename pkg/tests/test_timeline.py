import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from tmafh.timeline import (
    SWITCH_TABLE,
    SwitchSegment,
    TimelineError,
    build_timeline,
    timeline_text,
    timeline_to_waveform,
    validate_timeline,
)
from tmafh.waveform import LptmWaveform, sample_waveform, segment_index

GOLDEN = Path(__file__).parent / "golden"


def test_four_microsecond_window():
    w = LptmWaveform(250e3)
    segs = build_timeline(w, 4e-6)
    assert [s.phase_state for s in segs] == [0, 1, 2, 3, 4, 5]
    assert_allclose([s.duration for s in segs], 4e-6 / 6, rtol=1e-12)
    assert [s.t_end_ps - s.t_start_ps for s in segs] == [666667, 666666, 666667, 666667, 666666, 666667]


def test_one_segment_delay_shift():
    T = 4e-6
    segs = build_timeline(LptmWaveform(250e3, T / 6), T)
    assert [s.phase_state for s in segs] == [5, 0, 1, 2, 3, 4]
    assert_allclose([s.duration for s in segs], T / 6, rtol=1e-9)
    # starting state shared with the sampling lookup
    assert segs[0].phase_state == int(segment_index(LptmWaveform(250e3, T / 6), 0.0))


def test_single_segment_window():
    w = LptmWaveform(250e3)
    segs = build_timeline(w, w.period / 6)
    assert len(segs) == 1 and segs[0].phase_state == 0


def test_partial_edges():
    w = LptmWaveform(250e3, 100e-9)
    segs = build_timeline(w, 2e-6)
    assert segs[0].phase_state == 5
    assert segs[0].duration == pytest.approx(100e-9)
    assert segs[-1].t_end == 2e-6
    validate_timeline(segs)


def test_rejects_bad_window():
    with pytest.raises(ValueError):
        build_timeline(LptmWaveform(1e5), 0.0)


def test_first_sample_state_zero():
    segs = build_timeline(LptmWaveform(300e3), 10e-6)
    assert timeline_to_waveform(segs, [0.0])[0] == 1 + 0j


def test_gap_detected():
    segs = build_timeline(LptmWaveform(250e3), 4e-6)
    broken = segs[:2] + [SwitchSegment(1, segs[2].t_start + 1e-9, segs[2].t_end, segs[2].phase_state)] + segs[3:]
    with pytest.raises(TimelineError):
        timeline_to_waveform(broken, [0.0])


def test_overlap_and_state_errors():
    segs = build_timeline(LptmWaveform(250e3), 4e-6)
    over = segs[:2] + [SwitchSegment(1, segs[2].t_start - 1e-9, segs[2].t_end, segs[2].phase_state)] + segs[3:]
    with pytest.raises(TimelineError):
        validate_timeline(over)
    skip = segs[:2] + [SwitchSegment(1, segs[2].t_start, segs[2].t_end, 4)] + segs[3:]
    with pytest.raises(TimelineError):
        validate_timeline(skip)
    with pytest.raises(TimelineError):
        validate_timeline([])


def test_outside_window_rejected():
    segs = build_timeline(LptmWaveform(250e3), 4e-6)
    with pytest.raises(ValueError):
        timeline_to_waveform(segs, [4e-6])


@settings(max_examples=100, deadline=None)
@given(f=st.floats(1e4, 5e6), d=st.floats(0, 1), periods=st.floats(0.05, 20))
def test_tiling_and_cycle(f, d, periods):
    w = LptmWaveform(f, d / f)
    window = periods / f
    segs = build_timeline(w, window)
    validate_timeline(segs)
    assert segs[0].t_start == 0.0 and segs[-1].t_end == window
    assert sum(s.t_end_ps - s.t_start_ps for s in segs) == segs[-1].t_end_ps
    assert all(b.t_start_ps == a.t_end_ps for a, b in zip(segs, segs[1:]))
    for s in segs[1:-1]:
        assert s.duration == pytest.approx(1 / (6 * f), rel=1e-9)


def test_ps_boundaries_do_not_drift():
    # 1.2 MHz: T = 833333.33 ps; boundary i must equal round(i T/6) after 10^4 periods
    f = 1.2e6
    segs = build_timeline(LptmWaveform(f), 1e4 / f)
    t_ps = 1e12 / f
    for i in (1, 2, 7, 59999):
        assert segs[i].t_start_ps == math.floor(i * t_ps / 6 + 0.5)


def test_round_trip_random_configurations():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        f = rng.uniform(1e4, 2e6)
        w = LptmWaveform(f, rng.uniform(0, 1 / f))
        window = rng.uniform(0.1, 8) / f
        segs = build_timeline(w, window)
        t = rng.uniform(0, window, 200)
        # boundary-aligned points too
        b = np.array([s.t_start for s in segs])
        t = np.concatenate([t, b])
        assert np.array_equal(timeline_to_waveform(segs, t), sample_waveform(w, t))


def test_switch_table_realizes_phases():
    for state, pos in SWITCH_TABLE.items():
        assert (120 * pos["sp3t_in"] + 180 * pos["spdt_in"]) % 360 == 60 * state
        assert pos["sp3t_in"] == pos["sp3t_out"] and pos["spdt_in"] == pos["spdt_out"]
    assert len({tuple(p.values()) for p in SWITCH_TABLE.values()}) == 6


def test_timeline_export_format():
    segs = build_timeline(LptmWaveform(250e3), 4e-6, element=3)
    lines = timeline_text(segs).splitlines()
    assert lines[0] == "element,t_start_ps,t_end_ps,phase_state,phase_deg"
    assert lines[1] == "3,0,666667,0,0"
    assert lines[-1] == "3,3333333,4000000,5,300"
