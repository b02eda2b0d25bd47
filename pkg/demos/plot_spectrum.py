"""
The six-level stair-step and its single sideband
================================================

Each element is switched through six phase states, 60 degrees apart, once
per period. Only harmonics q = 6i + 1 survive, so the mirror image at
q = -1 is gone and the nearest unwanted line is q = -5.
"""

# %%
# A waveform at 50 kHz, sampled for one period.
import numpy as np
from tmafh import LptmWaveform, efficiency, parseval_check, spectrum
from tmafh.waveform import sample_period

w = LptmWaveform(50e3)
x = sample_period(w, 8)
print("distinct phases (deg):", sorted({int(round(a)) % 360 for a in np.degrees(np.angle(x))}))

# %%
# Relative levels of the surviving orders.
spec = spectrum(w, q_max=25)
for q in spec.nonnull_orders():
    print(f"q={q:+4d}  {spec.rel_db(q):8.3f} dB")

# %%
# The fundamental carries (3/pi)^2 of the power; the rest sums to one.
print("efficiency      ", efficiency())
print("Parseval, |q|<=1e4", parseval_check(10_000))
