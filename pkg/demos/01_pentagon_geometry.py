"""Pentagon and N-gon measurement directions.

Builds the frame at the compatibility angle, checks that neighbours are
orthogonal, and compiles each direction into laser pulses.
"""
# %%
import math

import numpy as np

from qutrit_kcbs.ngon import NgonConfig, build_frame, compatibility_angle, pulse_decomposition, pulse_count
from qutrit_kcbs.qutrit import basis, compose, fidelity

theta5 = compatibility_angle(5)
print("theta_5 =", theta5, "rad =", math.degrees(theta5), "deg")

# %%
frame = build_frame(NgonConfig(5, theta5))
for i, psi in enumerate(frame.states, start=1):
    print(i, np.round(psi.real, 4))

print("|<psi_i|psi_i+1>| :", frame.overlaps(1))
print("|<psi_i|psi_i+2>| :", frame.overlaps(2))  # non-neighbours are not orthogonal

# %% pulses: R1(2 theta) then a Z rotation built from R2 - R1^m - R2
for i in range(1, 6):
    seq = pulse_decomposition(frame.config, i)
    u = compose(seq)
    print(i, pulse_count(seq), "pulses, fidelity", fidelity(u @ basis(0), frame.state(i)))

# %% theta_N approaches pi/4 from above
for N in (5, 7, 11, 31, 121):
    print(N, compatibility_angle(N) - math.pi / 4)
