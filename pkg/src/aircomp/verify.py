"""Self-checks of the solvers against brute-force oracles and closed forms.

Every check takes its instance count and seed explicitly and returns a
:class:`CheckResult`; :func:`run_checks` bundles them at a named level.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .asymptotics import prop1_limit, prop2_limit
from .model import SystemConfig, derive_rng, generate_channel_instance
from .mse import TransceiverDesign, analytic_mse, empirical_mse
from .oracle import grid_search_simo, grid_search_siso, multistart_gap, multistart_probe_simo
from .simo import optimal_b_given_w, solve_simo
from .siso import solve_siso

__all__ = ["CheckResult", "random_instance", "LEVELS", "run_checks",
           "check_siso_optimality", "check_mc_consistency", "check_prop1", "check_prop2",
           "check_ao_monotone", "check_nr1_reduction", "check_multistart_gap",
           "check_simo_grid"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def random_instance(rng: np.random.Generator, num_wds: int, num_rx_antennas: int,
                    est_error_var=(0.0, 0.5), power=(0.1, 100.0), noise_var=(0.1, 4.0)):
    """Random scenario plus one channel draw.

    Error and noise variances are uniform on their ranges; the power budget
    is log-uniform; large-scale variances are uniform on [0.5, 1.5].
    """
    config = SystemConfig.uniform(
        num_wds, num_rx_antennas,
        power=float(np.exp(rng.uniform(np.log(power[0]), np.log(power[1])))),
        est_error_var=float(rng.uniform(*est_error_var)),
        noise_var=float(rng.uniform(*noise_var)),
        channel_var=rng.uniform(0.5, 1.5, num_wds),
    )
    return config, generate_channel_instance(config, rng).est_channel


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        result = fn(*args, **kw)
        result.seconds = time.perf_counter() - t0
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_siso_optimality(n: int, seed: int, steps: int = 100_000, max_wds: int = 8) -> CheckResult:
    """Closed-form SISO optimum vs dense scan of the denoising factor."""
    worst_above = -np.inf  # solver - raw grid (must be <= 1e-4)
    worst_below = np.inf   # solver - polished grid (must be >= -1e-9)
    for i in range(n):
        rng = derive_rng(seed, i)
        config, est = random_instance(rng, int(rng.integers(1, max_wds + 1)), 1)
        value = solve_siso(est, config).objective_value
        _, raw = grid_search_siso(est, config, steps=steps, polish=False)
        _, fine = grid_search_siso(est, config, steps=steps, polish=True)
        worst_above = max(worst_above, value - raw)
        worst_below = min(worst_below, value - fine)
    ok = worst_above <= 1e-4 and worst_below >= -1e-9
    return CheckResult("siso_optimality", ok,
                       f"{n} instances, max(solver-grid)={worst_above:.2e}, "
                       f"min(solver-polished)={worst_below:.2e}")


@_timed
def check_mc_consistency(n: int, seed: int, n_samples: int = 100_000,
                         required: float = 0.95) -> CheckResult:
    """Exact MSE vs Monte Carlo over messages, errors and noise (3 std errors)."""
    hits = 0
    for i in range(n):
        rng = derive_rng(seed, i)
        k, nr = int(rng.integers(1, 7)), int(rng.integers(1, 5))
        config, est = random_instance(rng, k, nr)
        amp = np.sqrt(config.power_budget) * rng.uniform(0, 1, k)
        b = amp * np.exp(2j * np.pi * rng.uniform(size=k))
        w = (rng.standard_normal(nr) + 1j * rng.standard_normal(nr)) * rng.uniform(0.05, 1.0)
        design = TransceiverDesign(b, w)
        exact = analytic_mse(design, est, config).total
        mean, se = empirical_mse(design, est, config, n_samples, rng)
        hits += abs(mean - exact) <= 3 * se
    ok = hits >= required * n
    return CheckResult("mc_vs_analytic", ok, f"{hits}/{n} designs within 3 std errors")


@_timed
def check_prop1(n: int, seed: int, power: float = 1e16, tol: float = 1e-6) -> CheckResult:
    """Optimal SISO MSE at huge power vs the large-power limit (K=20, s_e=0.1)."""
    worst = 0.0
    for i in range(n):
        rng = derive_rng(seed, i)
        config = SystemConfig.uniform(20, 1, power, 0.1, 1.0, rng.uniform(0.5, 1.5, 20))
        est = generate_channel_instance(config, rng).est_channel
        total = analytic_mse(solve_siso(est, config).design, est, config).total
        worst = max(worst, abs(total - prop1_limit(est, config)))
    return CheckResult("prop1_limit", worst <= tol, f"{n} instances, max |MSE-limit|={worst:.2e}")


@_timed
def check_prop2(n: int, seed: int, power: float = 1e16, tol: float = 1e-6) -> CheckResult:
    """Fixed beamforming direction at huge power vs its limit; limit >= bound.

    The limit does not depend on the scale of ``w`` while the noise term
    ``||w||^2 s_z / K^2`` does, so the direction is evaluated at norm
    ``P^(-1/4)``: noise vanishes and no coefficient hits its power cap.
    """
    worst, bound_ok = 0.0, True
    for i in range(n):
        rng = derive_rng(seed, i)
        nr = int(rng.integers(2, 9))
        config, est = random_instance(rng, int(rng.integers(1, 21)), nr, power=(power, power))
        w = rng.standard_normal(nr) + 1j * rng.standard_normal(nr)
        w *= power**-0.25 / np.linalg.norm(w)
        b = optimal_b_given_w(w, est, config)
        total = analytic_mse(TransceiverDesign(b, w), est, config).total
        limit, lower = prop2_limit(w, est, config)
        worst = max(worst, abs(total - limit))
        bound_ok &= limit >= lower
    return CheckResult("prop2_limit", worst <= tol and bound_ok,
                       f"{n} beamformers, max |MSE-limit|={worst:.2e}, bound holds={bound_ok}")


@_timed
def check_ao_monotone(n: int, seed: int, max_rx: int = 16, max_wds: int = 20,
                      slack: float = 1e-12) -> CheckResult:
    """Every AO step must not increase the objective by more than ``slack``."""
    worst = -np.inf
    for i in range(n):
        rng = derive_rng(seed, i)
        config, est = random_instance(rng, int(rng.integers(1, max_wds + 1)),
                                      int(rng.integers(2, max_rx + 1)))
        hist = np.array(solve_simo(est, config).objective_history)
        if hist.size > 1:
            worst = max(worst, float(np.max(np.diff(hist))))
    return CheckResult("ao_monotone", worst <= slack,
                       f"{n} runs, largest objective increase={worst:.2e}")


@_timed
def check_nr1_reduction(n: int, seed: int, rel_tol: float = 1e-6, required: float = 0.95,
                        max_wds: int = 8) -> CheckResult:
    """AO from the default init with one antenna vs the closed-form optimum."""
    close, beats = 0, 0.0
    for i in range(n):
        rng = derive_rng(seed, i)
        config, est = random_instance(rng, int(rng.integers(1, max_wds + 1)), 1)
        opt = solve_siso(est, config).objective_value
        ao = solve_simo(est, config).objective
        close += ao <= opt * (1 + rel_tol)
        beats = max(beats, opt - ao)
    ok = close >= required * n and beats <= 1e-9
    return CheckResult("nr1_reduction", ok,
                       f"{close}/{n} within {rel_tol:g} relative, max undercut={beats:.2e}")


@_timed
def check_multistart_gap(n: int, seed: int, n_starts: int = 8,
                         median_limit: float = 1e-3) -> CheckResult:
    """Median relative gap between the default init and the best of several starts."""
    gaps = []
    for i in range(n):
        rng = derive_rng(seed, i)
        config, est = random_instance(rng, int(rng.integers(2, 21)), int(rng.integers(2, 17)))
        gaps.append(multistart_gap(est, config, n_starts, rng))
    gaps = np.array(gaps)
    med = float(np.median(gaps))
    return CheckResult("multistart_gap", med < median_limit,
                       f"{n} instances, median gap={med:.2e}, "
                       f"share above 1%={np.mean(gaps > 0.01):.2f}")


@_timed
def check_simo_grid(n: int, seed: int, n_starts: int = 64, resolution: int = 100,
                    rel_tol: float = 1e-6) -> CheckResult:
    """Best AO objective vs gauge-fixed grid search (N_r = 2, K = 2)."""
    worst = 0.0
    for i in range(n):
        rng = derive_rng(seed, i)
        config, est = random_instance(rng, 2, 2, power=(0.1, 10.0))
        best = multistart_probe_simo(est, config, n_starts, rng)
        _, grid = grid_search_simo(est, config, resolution)
        worst = max(worst, abs(best - grid) / grid)
    return CheckResult("simo_grid", worst <= rel_tol,
                       f"{n} instances, max relative gap={worst:.2e}")


LEVELS: dict[str, list[tuple[Callable, dict]]] = {
    "quick": [
        (check_siso_optimality, dict(n=100, seed=101)),
        (check_mc_consistency, dict(n=10, seed=102, n_samples=20_000, required=0.9)),
        (check_prop1, dict(n=20, seed=103)),
        (check_prop2, dict(n=20, seed=104)),
        (check_ao_monotone, dict(n=30, seed=105)),
        (check_nr1_reduction, dict(n=100, seed=106)),
        (check_multistart_gap, dict(n=20, seed=107)),
        (check_simo_grid, dict(n=2, seed=108)),
    ],
    "full": [
        (check_siso_optimality, dict(n=1000, seed=201)),
        (check_mc_consistency, dict(n=100, seed=202)),
        (check_prop1, dict(n=100, seed=203)),
        (check_prop2, dict(n=100, seed=204)),
        (check_ao_monotone, dict(n=500, seed=205)),
        (check_nr1_reduction, dict(n=500, seed=206)),
        (check_multistart_gap, dict(n=200, seed=207)),
        (check_simo_grid, dict(n=10, seed=208)),
    ],
}


def run_checks(level: str = "quick", report: Callable[[str], None] | None = print) -> list[CheckResult]:
    """Run every check of ``level``; ``report`` receives one line per check."""
    results = []
    for fn, kwargs in LEVELS[level]:
        res = fn(**kwargs)
        results.append(res)
        if report:
            report(res.line())
    return results
