"""The five reference sweeps: MSE vs power, vs error variance, vs antennas.

Writes one CSV and one gnuplot data file per sweep into ``sweep_output/``
and prints the mean MSE table. Pass a trial count as the first argument
(default 50; the acceptance tests use 200).
"""

import sys
from pathlib import Path

from aircomp.harness import figure_spec, run_sweep, write_csv, write_plot_data

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 50
out = Path("sweep_output")
out.mkdir(exist_ok=True)

for fig in range(1, 6):
    spec = figure_spec(fig, trials=trials)
    res = run_sweep(spec)
    write_csv(res, out / f"fig{fig}.csv")
    write_plot_data(res, out / f"fig{fig}.dat")
    n_r = spec.base_config.num_rx_antennas
    print(f"\nsweep {fig}: {spec.swept_variable} (base N_r={n_r}), {trials} trials")
    print(f"{spec.swept_variable:>16} " + " ".join(f"{s:>18}" for s in res.schemes))
    for g, v in enumerate(spec.grid):
        print(f"{v:>16g} " + " ".join(f"{res.mean_mse[g, s]:>18.4e}" for s in range(len(res.schemes))))
