"""
Steering a 4-element array with switch delays
=============================================

Instead of phase shifters, each element's stair-step is delayed. A delay of
D_n shifts the first harmonic by exp(-j 2 pi f D_n), which is exactly what
a phase shifter would do, and the delay depends on the symbol frequency.
"""

# %%
import math

import numpy as np
from tmafh import ArrayGeometry, FrequencyPlan
from tmafh.array import pattern_db, solve_delay_table, theta_grid_deg

plan = FrequencyPlan()
theta0 = math.radians(30)

# %%
# Quarter-wave spacing indexed from 1 gives the familiar 500 ns steps for the
# lowest tone of hop slot 2.
quarter = ArrayGeometry.uniform(4, 0.25, "one_based")
table = solve_delay_table(quarter, plan, theta0)
for m in range(1, plan.M + 1):
    print(f"m={m} k=2", table[(m, 2)].delays_ns())

# %%
# Half-wave spacing from the first element.
half = ArrayGeometry.uniform(4, 0.5, "zero_based")
table = solve_delay_table(half, plan, theta0)
print("m=1 k=2", table[(1, 2)].delays_ns())

# %%
# Every symbol points its first-harmonic beam at 30 degrees.
deg = theta_grid_deg(0.05)
peaks = {mk: deg[np.argmax(pattern_db(half, s, np.radians(deg)))] for mk, s in table.items()}
print("beam peaks (deg):", sorted({float(round(p, 2)) for p in peaks.values()}))
