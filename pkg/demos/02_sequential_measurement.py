# Lüders measurements in sequence: joint outcome statistics of M_i then M_j.
import numpy as np

from qutrit_kcbs.measurement import DetectionError, apply_detection_error, commutator_norm, make_measurement, pair_distribution
from qutrit_kcbs.ngon import NgonConfig, build_frame, compatibility_angle

rho0 = np.diag([1, 0, 0]).astype(complex)
theta5 = compatibility_angle(5)

for theta in (theta5, theta5 + 0.2):
    ms = [make_measurement(u) for u in build_frame(NgonConfig(5, theta)).unitaries]
    fwd = pair_distribution(rho0, ms[0], ms[1])
    bwd = pair_distribution(rho0, ms[1], ms[0])
    print(f"theta = {theta:.4f}  [M1, M2] = {commutator_norm(ms[0], ms[1]):.2e}")
    print("   M1 then M2:", np.round(fwd.as_array(), 5), " <A1>", round(fwd.mean_first, 5), " <A2>", round(fwd.mean_second, 5))
    print("   M2 then M1:", np.round(bwd.as_array(), 5), " <A1>", round(bwd.mean_first, 5), " <A2>", round(bwd.mean_second, 5))

# a second measurement of the same observable repeats the first outcome
m = make_measurement(build_frame(NgonConfig(5, 0.7)).unitary(3))
print("repeat correlator:", pair_distribution(rho0, m, m).correlator)

# detection errors: flip labels after the projection
d = pair_distribution(rho0, ms[0], ms[1])
noisy = apply_detection_error(d, DetectionError(2e-5, 1e-4))
print("correlator shift from detection errors:", noisy.correlator - d.correlator)
