"""The interacting-particle system against its mean-field flow.

Simulates replicated particle systems in a supercritical rod-kernel
regime from a common nonuniform initial law and compares the
replicate-averaged squared order parameter against the deterministic
flow value (the sampling floor 1/N is subtracted, so the comparison is
unbiased even at zero signal).
"""

import numpy as np

import torusmf as tm
from torusmf.particles import chaos_check, simulate

coupling = 1.2 * 3 * np.pi / 4
w = tm.doi_onsager(truncation=128)
q0 = tm.cosine_profile({2: 0.2}, 512)

report = chaos_check(w, coupling, n=2000, horizon=3.0, replicates=8,
                     dt=1e-3, q0=q0, seed=11, workers=4)
print(f"supercritical rod kernel, K = {coupling:.4f}, N = 2000, T = 3")
print(f"  flow |qhat(2)|^2      : {report.pde_value_sq:.5f}")
print(f"  particles (debiased)  : {report.particle_mean_sq:.5f} "
      f"+/- {report.particle_se:.5f}")
print(f"  z-score               : {report.z_score:+.2f}")

traj = simulate(w, coupling, 2000, 3.0, dt=1e-3, seed=11, q0=q0,
                record_every=200)
print("\none replicate, order-parameter growth:")
for t, a in zip(traj.times, traj.mode_abs[2]):
    print(f"  t = {t:5.2f}   |qhat_N(2)| = {a:.4f}")
