"""Closed-form limits against the solvers.

* very high power, one antenna: the optimum approaches a residual set by
  the estimation errors alone;
* very high power, fixed beamforming direction: same, with the effective
  channel, never below the matched-filter bound;
* many antennas with fixed unit coefficients: the per-device orthogonal
  expression against simulation, and the aggregate-gain expression.
"""

import numpy as np

from aircomp import (SystemConfig, TransceiverDesign, analytic_mse, derive_rng,
                     generate_channel_instance, orthogonal_regime_mse, prop1_limit, prop2_limit,
                     prop3_asymptotic_mse, solve_siso)
from aircomp.simo import optimal_b_given_w, optimal_w_given_b

config = SystemConfig.uniform(20, 1, est_error_var=0.1, channel_var=np.linspace(0.5, 1.5, 20))
est = generate_channel_instance(config, derive_rng(1)).est_channel
print("one antenna: optimal MSE vs power")
for p_db in (0, 10, 20, 40, 80, 160):
    cfg = config.replace(power_budget=10.0 ** (p_db / 10))
    print(f"  {p_db:>4} dB: {analytic_mse(solve_siso(est, cfg).design, est, cfg).total:.8f}")
print(f"  limit:   {prop1_limit(est, config):.8f}")

cfg = SystemConfig.uniform(10, 4, power=1e16, est_error_var=0.2)
est = generate_channel_instance(cfg, derive_rng(2)).est_channel
rng = derive_rng(3)
w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
w *= 1e-4 / np.linalg.norm(w)
limit, lower = prop2_limit(w, est, cfg)
mse = analytic_mse(TransceiverDesign(optimal_b_given_w(w, est, cfg), w), est, cfg).total
print(f"\nfixed direction: MSE {mse:.8f}, limit {limit:.8f}, bound {lower:.8f}")

print("\nmany antennas, unit coefficients (K=20, s_e=0.1, s_z=1)")
b = np.ones(20)
for n in (16, 64, 256):
    cfg = SystemConfig.uniform(20, n, power=1.0, est_error_var=0.1)
    sims = []
    for t in range(20):
        e = generate_channel_instance(cfg, derive_rng(4, n, t)).est_channel
        sims.append(analytic_mse(TransceiverDesign(b, optimal_w_given_b(b, e, cfg)), e, cfg).total)
    print(f"  N_r={n:>3}: simulated {np.mean(sims):.3e}  per-device {orthogonal_regime_mse(b, n, 1.0, cfg):.3e}"
          f"  aggregate {prop3_asymptotic_mse(b, n, 1.0, cfg):.3e}")
