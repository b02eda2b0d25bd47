"""
Switch timelines for the feeding network
========================================

The stair-step is realized as a schedule of switch states. Rebuilding the
waveform from the schedule must give back the original samples.
"""

# %%
import math

import numpy as np
from tmafh import ArrayGeometry, FrequencyPlan
from tmafh.array import solve_delays
from tmafh.freqplan import tx_offset
from tmafh.timeline import SWITCH_TABLE, build_timeline, timeline_text, timeline_to_waveform
from tmafh.waveform import sample_waveform

plan = FrequencyPlan()
f = tx_offset(plan, 1, 1)
sched = solve_delays(ArrayGeometry.uniform(4, 0.5), math.radians(30), f)
w = sched.waveforms()[1]
segs = build_timeline(w, 1 / f, element=2)
print(timeline_text(segs))

# %%
# Switch throws behind each phase state.
for s, pos in SWITCH_TABLE.items():
    print(60 * s, pos)

# %%
t = np.random.default_rng(0).uniform(0, 1 / f, 1000)
print("round trip exact:", np.array_equal(timeline_to_waveform(segs, t), sample_waveform(w, t)))
