"""Brute-force reference solutions for small instances.

These searches share no code path with the closed-form SISO solver or
with the alternating optimizer beyond the per-WD scalar minimization,
which is checked on its own against a dense scan.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .model import SystemConfig
from .siso import compute_quality_indicators, reduced_objective
from .simo import solve_simo, solve_simo_multistart

__all__ = [
    "default_w_max",
    "grid_search_siso",
    "best_amplitude_objective",
    "simo_objective_given_w",
    "grid_search_simo",
    "multistart_probe_simo",
    "multistart_gap",
]


def default_w_max(est_channels, config: SystemConfig) -> float:
    """Scan range covering every candidate optimum of the SISO problem."""
    rho = np.array([q.rho for q in compute_quality_indicators(est_channels, config)])
    finite = rho[np.isfinite(rho) & (rho > 0)]
    inv_max = float(np.max(1.0 / finite)) if finite.size else 0.0
    est = np.abs(np.asarray(est_channels, dtype=complex).reshape(-1))
    p, s2e = config.power_budget, config.est_error_var
    w_all = np.sum(np.sqrt(p) * est) / (np.sum(p * (est**2 + s2e)) + config.noise_var)
    return 4.0 * inv_max + 4.0 * float(w_all) or 1.0


def grid_search_siso(est_channels, config: SystemConfig, w_max: float | None = None,
                     steps: int = 100_000, polish: bool = True) -> tuple[float, float]:
    """Scan the denoising factor on ``[0, w_max]`` and return the best point.

    Every WD plays its optimal amplitude for each scanned ``w``. With
    ``polish`` the best grid cell is refined by bounded Brent search on
    the two neighbouring cells; the better of grid and polished point wins.
    """
    if config.num_rx_antennas != 1:
        raise ValueError("grid_search_siso needs num_rx_antennas == 1")
    if w_max is None:
        w_max = default_w_max(est_channels, config)
    grid = np.linspace(0.0, w_max, steps)
    values = np.concatenate([reduced_objective(chunk, est_channels, config)
                             for chunk in np.array_split(grid, max(1, steps // 20_000))])
    i = int(np.argmin(values))
    best_w, best_val = float(grid[i]), float(values[i])
    if polish and steps > 1:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, steps - 1)]
        res = optimize.minimize_scalar(
            lambda w: float(reduced_objective(w, est_channels, config)),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-13 * max(1.0, hi)})
        if res.fun < best_val:
            best_w, best_val = float(res.x), float(res.fun)
    return best_w, best_val


def best_amplitude_objective(gain_mag, w_sq, power, est_error_var):
    """min over ``0 <= a <= sqrt(P)`` of ``(|g| a - 1)^2 + ||w||^2 s_e a^2``.

    Convex scalar quadratic: clamp the stationary point to the box.
    Broadcasts.
    """
    curv = gain_mag**2 + w_sq * est_error_var
    with np.errstate(divide="ignore", invalid="ignore"):
        stationary = np.where(curv > 0, gain_mag / curv, 0.0)
    a = np.clip(stationary, 0.0, np.sqrt(power))
    return (gain_mag * a - 1.0) ** 2 + w_sq * est_error_var * a**2


def simo_objective_given_w(w, est_channels, config: SystemConfig):
    """Objective with every WD at its best coefficient for beamformer(s) ``w``.

    ``w`` may be ``(N,)`` or a stack ``(M, N)``.
    """
    w = np.asarray(w, dtype=complex)
    est = np.asarray(est_channels, dtype=complex)
    gain = np.abs(w.conj() @ est.T)  # |w^H h_k|
    w_sq = np.sum(np.abs(w) ** 2, axis=-1)
    per_wd = best_amplitude_objective(gain, w_sq[..., None], config.power_budget,
                                      config.est_error_var)
    return per_wd.sum(axis=-1) + w_sq * config.noise_var


def grid_search_simo(est_channels, config: SystemConfig, resolution: int = 100,
                     polish: bool = True) -> tuple[np.ndarray, float]:
    """Dense search over two-antenna beamformers, phase gauge fixed.

    ``w = (a, c + i d)`` with ``a >= 0``; every coordinate is bounded by
    ``sqrt(K / s_z)`` because the noise term alone exceeds the ``w = 0``
    objective beyond that radius. The best grid point is polished with
    Nelder-Mead.
    """
    if config.num_rx_antennas != 2:
        raise ValueError("grid_search_simo is limited to num_rx_antennas == 2")
    radius = math.sqrt(config.num_wds / config.noise_var)
    a = np.linspace(0.0, radius, resolution)
    cd = np.linspace(-radius, radius, resolution)
    cc, dd = np.meshgrid(cd, cd, indexing="ij")
    second = (cc + 1j * dd).reshape(-1)

    best_val, best_w = math.inf, None
    for a_i in a:
        w = np.column_stack([np.full(second.size, a_i, dtype=complex), second])
        values = simo_objective_given_w(w, est_channels, config)
        j = int(np.argmin(values))
        if values[j] < best_val:
            best_val, best_w = float(values[j]), w[j]

    if polish:
        def f(x):
            return float(simo_objective_given_w(np.array([x[0], x[1] + 1j * x[2]]),
                                                est_channels, config))
        x0 = np.array([best_w[0].real, best_w[1].real, best_w[1].imag])
        res = optimize.minimize(f, x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20_000})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_w = np.array([res.x[0], res.x[1] + 1j * res.x[2]])
    return best_w, best_val


def multistart_probe_simo(est_channels, config: SystemConfig, n_starts: int,
                          rng: np.random.Generator | None = None) -> float:
    """Best final AO objective over ``n_starts`` starts (the first is the default init)."""
    return solve_simo_multistart(est_channels, config, n_starts, rng=rng).objective


def multistart_gap(est_channels, config: SystemConfig, n_starts: int,
                   rng: np.random.Generator | None = None) -> float:
    """Relative excess of the default-init AO objective over the best start."""
    default = solve_simo(est_channels, config).objective
    best = min(default, multistart_probe_simo(est_channels, config, n_starts, rng))
    return (default - best) / best if best > 0 else 0.0
