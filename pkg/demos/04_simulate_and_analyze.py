# %% Simulate the pentagon experiment, analyze it like the lab data.
from qutrit_kcbs.ngon import NgonConfig, Order
from qutrit_kcbs.shotfile import read_shots, write_shots
from qutrit_kcbs.simulator import NoiseModel, RunPlan, run
from qutrit_kcbs.stats import analyze, violation_significance

config = NgonConfig.compatible(5)

for name in ("ideal", "calibrated"):
    plan = RunPlan(config, (Order.NORMAL, Order.REVERSE), n_per_pair=10_000, seed=7, noise=NoiseModel.preset(name))
    table = run(plan)
    print(f"--- {name}: {len(table)} shots")
    for order, r in analyze(table).items():
        bare, ext = violation_significance(r)
        print(f"{order.value:8s} S5 = {r.S}  S5_ext = {r.S_ext}  CF = {r.CF}  theta = {r.theta_est}")
        print(f"{'':8s} {bare:.1f} sigma (bare), {ext:.1f} sigma (extended) below -3")

# %% the file format round-trips exactly
write_shots(table, "/tmp/pentagon_shots.csv")
print("round trip identical:", read_shots("/tmp/pentagon_shots.csv").equals(table))
