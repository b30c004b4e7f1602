"""Single-antenna optimum: who transmits at full power and who inverts.

Solves one 8-device instance, prints the quality indicators in ascending
order with each device's policy, and checks the closed form against a
dense scan of the denoising factor.
"""

import numpy as np

from aircomp import SystemConfig, analytic_mse, derive_rng, generate_channel_instance, solve_siso
from aircomp.oracle import grid_search_siso
from aircomp.siso import compute_quality_indicators

config = SystemConfig.uniform(8, 1, power=2.0, est_error_var=0.1, noise_var=1.0,
                              channel_var=np.linspace(0.5, 1.5, 8))
est = generate_channel_instance(config, derive_rng(7)).est_channel

sol = solve_siso(est, config)
print(f"denoising factor w* = {sol.denoise_factor:.6f}, full-power devices k* = {sol.k_star}")
print(f"{'rank':>4} {'device':>6} {'rho':>9} {'|b|':>9} policy")
for rank, q in enumerate(compute_quality_indicators(est, config)):
    policy = "full power" if rank < sol.k_star else "inversion"
    print(f"{rank:>4} {q.wd_index:>6} {q.rho:>9.4f} {abs(sol.tx_coeff[q.wd_index]):>9.4f} {policy}")

w_grid, v_grid = grid_search_siso(est, config)
print(f"closed form objective {sol.objective_value:.12f}")
print(f"scan + polish        {v_grid:.12f} at w = {w_grid:.6f}")
print(f"MSE = {analytic_mse(sol.design, est, config).total:.6e}")
