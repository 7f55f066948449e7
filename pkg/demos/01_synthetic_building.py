"""A synthetic office building, its step response and which inputs matter.

Run: python demos/01_synthetic_building.py
"""

import numpy as np

from heatcast.pipeline import schedule_features
from heatcast.relevance import relevance_report
from heatcast.schedules import default_schedule
from heatcast.synth import BuildingParams, generate, respond

schedule = default_schedule()
bp = BuildingParams(seed=1)

# The plant closes 63 % of a step in one time constant and lags the
# target by the transport delay.
step = respond(np.r_[0.0, np.ones(8)], BuildingParams(noise_std=0, delay=15), ts=15, initial=0.0)
print("unit step, delay 15 min, tau 15 min:", np.round(step, 3))

ds = generate(27, schedule, bp)
print(f"\n{len(ds)} samples from {ds.timestamps[0]} to {ds.timestamps[-1]}")
print(f"outside temperature {ds.t_out.min():.1f} .. {ds.t_out.max():.1f} C, mean {ds.t_out.mean():.2f}")
print(f"solar peak {ds.g_solar.max():.0f} W/m2, heat demand mean {ds.p_heat.mean():.0f} kW")

# one working day, hourly
day = ds[96 * 2 : 96 * 3]
print("\nWednesday, hourly demand (kW):")
print(" ".join(f"{v:4.0f}" for v in day.p_heat[::4]))

series, _ = schedule_features(ds, schedule)
print("\nrelevance to heat demand:")
for e in relevance_report(ds, series):
    print(f"  {e.variable:<10} r = {e.r:+.3f}  {e.band.value}")
