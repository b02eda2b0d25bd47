"""Frequency-hopped M-FSK direct antenna modulation with single-sideband
time-modulated arrays."""
from .waveform import (
    LptmWaveform,
    FourierCoefficient,
    Spectrum,
    efficiency,
    fourier_coefficient,
    in_psi,
    parseval_check,
    sample_waveform,
    shifted_coefficient,
    spectrum,
)
from .freqplan import FrequencyPlan, Schedule, build_schedule, hop_pattern, tx_offset
from .array import (
    ArrayGeometry,
    DelaySchedule,
    UndersampledError,
    array_factor,
    harmonic_pattern,
    pattern_db,
    radiated_signal,
    solve_delay_table,
    solve_delays,
    steered_pattern,
)
from .link import (
    BerPoint,
    LinkBudget,
    awgn,
    ber_curve,
    budget,
    demod_mfsk,
    theoretical_ser,
)
from .timeline import SwitchSegment, build_timeline, timeline_to_waveform

__version__ = "0.1.0"
