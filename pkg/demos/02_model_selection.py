"""Compare the six input layouts with the degree-of-freedom adjusted sweep.

Model 1 sees only the current schedule and weather; models 2-6 add the
transitional staircase and its lags, which let the network anticipate the
delayed plant response after each schedule change.

Run: python demos/02_model_selection.py   (about a minute with 4 workers)
"""

from heatcast.mlp import TrainConfig
from heatcast.pipeline import prepare
from heatcast.schedules import default_schedule
from heatcast.selection import dof_spec, sweep
from heatcast.synth import BuildingParams, generate

schedule = default_schedule()
ds = generate(27, schedule, BuildingParams(seed=0))
preps = [prepare(ds, schedule, m) for m in range(1, 7)]

p6 = preps[-1]
spec = dof_spec(p6.m_learn, p6.l_x, 9)
print(f"model 6 with 9 hidden: {spec.l_theta} parameters, {spec.dof} degrees of freedom, "
      f"hidden sizes allowed up to {spec.w_max}")

res = sweep(preps, TrainConfig(), sizes=range(3, 14), jobs=4)
print(f"\n{'model':>5} {'hidden':>6} {'r2 learn':>9} {'r2 val':>7} {'r2 test':>8} {'energy err %':>12}")
for r in res.reports:
    row = r.row()
    print(f"{row['model']:>5} {row['hidden_neurons']:>6} {row['r2_learning']:9.3f} {row['r2_validation']:7.3f} "
          f"{row['r2_testing']:8.3f} {row['energy_error_validation_pct']:12.2f}")
