"""Seeded Monte Carlo sweeps comparing the proposed design with benchmarks.

For every grid point and trial a single channel draw is shared by all
schemes (paired comparison). Each scheme's design is scored with the exact
MSE under the true estimation-error variances.

Trials are processed in fixed-size chunks. Chunk composition and every
random stream depend only on the sweep definition, so results do not
change with the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .baselines import fixed_rule_designs, ignoring_csi_designs
from .model import SystemConfig, derive_rng, generate_channel_instance, validate_config
from .mse import analytic_mse
from .simo import solve_simo_multistart_batch
from .siso import solve_siso

__all__ = [
    "SCHEMES",
    "VARIABLES",
    "SweepError",
    "SweepSpec",
    "SweepResult",
    "config_at",
    "run_sweep",
    "summarize",
    "write_csv",
    "read_csv",
    "write_plot_data",
    "CSV_HEADER",
    "FIGURES",
    "figure_spec",
]

SCHEMES = ("proposed", "ignore_csi", "full_power", "channel_inversion")
VARIABLES = ("power_db", "est_error_var", "num_rx_antennas")
CSV_HEADER = ("variable", "grid_value", "scheme", "mean_mse", "std_error", "trials")
CHUNK_SIZE = 50

# stream keys for the multistart inits; fixed per scheme so that adding or
# removing schemes never changes another scheme's draws
_SCHEME_KEY = {name: i + 1 for i, name in enumerate(SCHEMES)}


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    """One Monte Carlo sweep over a single variable.

    ``grid`` values are dB for ``power_db`` and linear otherwise.
    ``n_starts`` is the number of AO starts for the multi-antenna proposed
    and ignore-CSI schemes.
    """

    swept_variable: str
    grid: tuple
    trials: int
    schemes: tuple
    master_seed: int
    base_config: SystemConfig
    n_starts: int = 1
    tol: float = 1e-9
    max_iter: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.swept_variable not in VARIABLES:
            raise ValueError(f"swept_variable must be one of {VARIABLES}")
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError("duplicate schemes")
        if self.swept_variable == "num_rx_antennas" and any(g != int(g) or g < 1 for g in self.grid):
            raise ValueError("antenna counts must be positive integers")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        validate_config(self.base_config)


@dataclass
class SweepResult:
    """Aggregated MSE per (grid point, scheme).

    ``mean_mse`` and ``std_error`` have shape ``(G, S)`` with schemes in
    ``schemes`` order; ``samples`` keeps the per-trial MSEs ``(G, S, T)``.
    """

    variable: str
    grid: tuple
    schemes: tuple
    mean_mse: np.ndarray
    std_error: np.ndarray
    trials_used: np.ndarray
    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def mean(self, scheme: str) -> np.ndarray:
        return self.mean_mse[:, self.schemes.index(scheme)]

    def stderr(self, scheme: str) -> np.ndarray:
        return self.std_error[:, self.schemes.index(scheme)]


def config_at(spec: SweepSpec, value: float) -> SystemConfig:
    base = spec.base_config
    if spec.swept_variable == "power_db":
        return base.replace(power_budget=10.0 ** (value / 10.0))
    if spec.swept_variable == "est_error_var":
        return base.replace(est_error_var=value)
    return base.replace(num_rx_antennas=int(value))


def _scheme_designs(scheme, est, config, spec, g, trial_ids):
    if scheme in ("full_power", "channel_inversion"):
        return fixed_rule_designs(scheme, est, config, spec.tol, spec.max_iter)
    rngs = [derive_rng(spec.master_seed, g, t, _SCHEME_KEY[scheme]) for t in trial_ids]
    if scheme == "ignore_csi":
        return ignoring_csi_designs(est, config, spec.n_starts, rngs,
                                    tol=spec.tol, max_iter=spec.max_iter)
    if config.num_rx_antennas == 1:
        return [solve_siso(e, config).design for e in est]
    traces = solve_simo_multistart_batch(est, config, spec.n_starts, rngs, spec.tol, spec.max_iter)
    return [t.final_design for t in traces]


def _run_chunk(spec: SweepSpec, g: int, trial_ids: list[int]) -> np.ndarray:
    """MSE of every scheme on trials ``trial_ids`` of grid point ``g``: ``(S, len)``."""
    config = config_at(spec, spec.grid[g])
    est = np.stack([generate_channel_instance(config, derive_rng(spec.master_seed, g, t)).est_channel
                    for t in trial_ids])
    out = np.empty((len(spec.schemes), len(trial_ids)))
    for s, scheme in enumerate(spec.schemes):
        try:
            designs = _scheme_designs(scheme, est, config, spec, g, trial_ids)
            for j, design in enumerate(designs):
                out[s, j] = analytic_mse(design, est[j], config).total
        except Exception as exc:
            raise SweepError(f"grid point {g} ({spec.swept_variable}={spec.grid[g]}), "
                             f"trials {trial_ids[0]}-{trial_ids[-1]}, scheme {scheme}: {exc}") from exc
    return out


def _chunk_job(args):
    return _run_chunk(*args)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every (grid point, trial, scheme) and aggregate.

    ``workers`` caps process parallelism; ``None`` reads ``AIRCOMP_THREADS``
    and defaults to 1.
    """
    if workers is None:
        workers = int(os.environ.get("AIRCOMP_THREADS", "1"))
    jobs = [(spec, g, list(range(start, min(start + CHUNK_SIZE, spec.trials))))
            for g in range(len(spec.grid)) for start in range(0, spec.trials, CHUNK_SIZE)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_chunk_job, jobs))
    else:
        outputs = [_chunk_job(job) for job in jobs]

    n_g, n_s = len(spec.grid), len(spec.schemes)
    samples = np.empty((n_g, n_s, spec.trials))
    for (_, g, ids), out in zip(jobs, outputs):
        samples[g, :, ids[0]:ids[-1] + 1] = out

    mean = np.empty((n_g, n_s))
    stderr = np.empty((n_g, n_s))
    for g in range(n_g):
        for s in range(n_s):
            x = samples[g, s]
            mean[g, s] = math.fsum(x) / x.size
            if x.size > 1:
                var = math.fsum((x - mean[g, s]) ** 2) / (x.size - 1)
                stderr[g, s] = math.sqrt(var / x.size)
            else:
                stderr[g, s] = math.nan

    metadata = {
        "config": spec.base_config.to_dict(),
        "master_seed": spec.master_seed,
        "n_starts": spec.n_starts,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return SweepResult(variable=spec.swept_variable, grid=spec.grid, schemes=spec.schemes,
                       mean_mse=mean, std_error=stderr,
                       trials_used=np.full((n_g, n_s), spec.trials),
                       samples=samples, metadata=metadata)


# -- serialization ------------------------------------------------------------

def _fmt_grid(variable: str, value: float) -> str:
    return str(int(value)) if variable == "num_rx_antennas" else repr(float(value))


def summarize(result: SweepResult) -> list[dict]:
    """Flatten to CSV rows, ordered by grid point then scheme name."""
    rows = []
    order = sorted(range(len(result.schemes)), key=lambda s: result.schemes[s])
    for g, value in enumerate(result.grid):
        for s in order:
            rows.append({
                "variable": result.variable,
                "grid_value": _fmt_grid(result.variable, value),
                "scheme": result.schemes[s],
                "mean_mse": repr(float(result.mean_mse[g, s])),
                "std_error": repr(float(result.std_error[g, s])),
                "trials": str(int(result.trials_used[g, s])),
            })
    return rows


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(result: SweepResult, path: str | Path) -> None:
    """Write ``summarize(result)`` atomically (temp file + rename)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(summarize(result))
    _atomic_write(path, buf.getvalue())


def read_csv(path: str | Path) -> list[dict]:
    """Parse a sweep CSV; numeric columns come back as float/int."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["grid_value"] = float(row["grid_value"])
        row["mean_mse"] = float(row["mean_mse"])
        row["std_error"] = float(row["std_error"])
        row["trials"] = int(row["trials"])
    return rows


def write_plot_data(result: SweepResult, path: str | Path) -> None:
    """Whitespace-separated blocks (one per scheme) for gnuplot's ``index``."""
    blocks = []
    for s in sorted(range(len(result.schemes)), key=lambda s: result.schemes[s]):
        lines = [f"# scheme {result.schemes[s]}", f"# {result.variable} mean_mse std_error"]
        for g, value in enumerate(result.grid):
            lines.append(f"{_fmt_grid(result.variable, value)} "
                         f"{result.mean_mse[g, s]!r} {result.std_error[g, s]!r}")
        blocks.append("\n".join(lines))
    _atomic_write(path, "\n\n\n".join(blocks) + "\n")


# -- the five reference sweeps ---------------------------------------------------

def _figure_table():
    power_grid = tuple(range(-10, 31, 5))
    error_grid = tuple(round(0.05 * i, 2) for i in range(11))
    return {
        1: ("power_db", power_grid, dict(num_rx_antennas=1, est_error_var=0.1)),
        2: ("power_db", power_grid, dict(num_rx_antennas=10, est_error_var=0.1)),
        3: ("est_error_var", error_grid, dict(num_rx_antennas=1, power_db=10.0)),
        4: ("est_error_var", error_grid, dict(num_rx_antennas=10, power_db=10.0)),
        5: ("num_rx_antennas", (1, 2, 4, 8, 16, 32, 64), dict(power_db=10.0, est_error_var=0.1)),
    }


FIGURES = tuple(_figure_table())


def figure_spec(figure: int, trials: int = 200, master_seed: int = 2022, num_wds: int = 20,
                noise_var: float = 1.0, channel_var_range=(0.5, 1.5), n_starts: int = 1,
                schemes=SCHEMES) -> SweepSpec:
    """Definition of one of the five standard sweeps (numbered 1 to 5).

    K = 20 WDs, common power and error variance; the per-WD large-scale
    variances are drawn once from ``channel_var_range`` with ``master_seed``.
    Fixed parameters not on the swept axis: P = 10 dB, s_e = 0.1.
    """
    variable, grid, fixed = _figure_table()[figure]
    power_db = fixed.get("power_db", 10.0)
    channel_var = derive_rng(master_seed, 0xC4A7).uniform(*channel_var_range, size=num_wds)
    base = SystemConfig.uniform(num_wds, fixed.get("num_rx_antennas", 1),
                                power=10.0 ** (power_db / 10.0),
                                est_error_var=fixed.get("est_error_var", 0.1),
                                noise_var=noise_var, channel_var=channel_var)
    return SweepSpec(variable, grid, trials, tuple(schemes), master_seed, base, n_starts=n_starts)
