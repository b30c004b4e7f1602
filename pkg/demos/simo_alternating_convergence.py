"""Multi-antenna design by alternating power control and beamforming.

Prints the objective trajectory of one run, then compares the default
start with the best of several random starts on a handful of draws.
"""

import numpy as np

from aircomp import SystemConfig, derive_rng, generate_channel_instance, solve_simo
from aircomp.simo import solve_simo_multistart

config = SystemConfig.uniform(20, 8, power=10.0, est_error_var=0.1, noise_var=1.0)
est = generate_channel_instance(config, derive_rng(3)).est_channel

trace = solve_simo(est, config)
hist = np.array(trace.objective_history)
print(f"converged={trace.converged} after {trace.iterations} iterations")
for i in sorted({0, 1, 2, 5, 10, 50, 100, trace.iterations - 1} & set(range(trace.iterations))):
    print(f"  iter {i + 1:>4}: objective {hist[i]:.10f}")
print(f"largest single-step increase: {np.max(np.diff(hist), initial=-np.inf):.2e}")

print("\ndefault start vs best of 8 starts")
for t in range(5):
    e = generate_channel_instance(config, derive_rng(3, t)).est_channel
    default = solve_simo(e, config).objective
    best = solve_simo_multistart(e, config, 8, rng=derive_rng(4, t))
    print(f"  draw {t}: {default:.8f} vs {best.objective:.8f} (start {best.start_index})")
