"""Scan the opening angle and locate the extended-witness minimum.

The bare witness keeps falling past the compatibility angle while the
signalling penalty grows, so the extended witness has a kink at theta_5.
A V-plus-parabola fit locates it from simulated data.
"""
import numpy as np

from qutrit_kcbs.ngon import NgonConfig, compatibility_angle
from qutrit_kcbs.simulator import RunPlan, theta_scan
from qutrit_kcbs.stats import aggregate, fit_vertex, witness
from qutrit_kcbs.theory import expected_s_ext, s5_ext_theory

theta5 = compatibility_angle(5)
thetas = np.linspace(theta5 - 0.3, theta5 + 0.3, 11)
scan = theta_scan(RunPlan(NgonConfig(5, theta5), n_per_pair=50_000, seed=3), thetas)

rows = []
print("# theta_set  theta_est  S5  S5_ext  S5_ext(theory)  E[S5_ext]")
for theta, table in scan:
    r = witness(aggregate(table))
    rows.append(r.S_ext.value)
    print(f"{theta:.4f} {r.theta_est.value:.4f} {r.S.value:+.4f} {r.S_ext.value:+.4f} "
          f"{s5_ext_theory(theta):+.4f} {expected_s_ext(theta, 50_000):+.4f}")

print("fitted minimum:", fit_vertex(thetas, rows), "  theta_5:", theta5)
