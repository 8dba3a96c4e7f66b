# Contextual fraction against N: ideal model versus the calibrated noise preset.
# The calibrated model loses contrast as the pulse sequences lengthen, so CF
# turns negative at large N. Equivalent CLI: qutrit-kcbs ngon-sweep --noise calibrated
from qutrit_kcbs.ngon import NgonConfig, SequenceMode
from qutrit_kcbs.simulator import NoiseModel, RunPlan, run
from qutrit_kcbs.stats import aggregate, witness
from qutrit_kcbs.theory import bounds

cal = NoiseModel.preset("calibrated")
print("# N  ideal_CF(theory)  CF_ideal  CF_calibrated  S_calibrated")
for N in (5, 11, 31, 61, 81, 101, 121):
    config = NgonConfig.compatible(N, SequenceMode.CONCATENATED)
    cf = []
    for noise in (NoiseModel.preset("ideal"), cal):
        r = witness(aggregate(run(RunPlan(config, n_per_pair=10_000, seed=N, noise=noise), workers=4)))
        cf.append(r)
    print(N, round(bounds(N).ideal_cf, 3), round(cf[0].CF.value, 3), round(cf[1].CF.value, 3), round(cf[1].S.value, 3))
