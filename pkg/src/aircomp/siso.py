"""Globally optimal single-antenna (N_r = 1) transceiver design.

With phase alignment the receive weight reduces to a nonnegative
denoising factor ``w``. For fixed ``w`` each WD either transmits at full
power or applies regularized channel inversion. The remaining 1-D problem
in ``w`` is piecewise quadratic over ``K + 1`` intervals delimited by the
reciprocal quality indicators ``1 / rho_k``; minimizing on each interval and
keeping the best candidate gives the global optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SystemConfig, validate_config
from .mse import TransceiverDesign

__all__ = [
    "WdQuality",
    "SisoSolution",
    "optimal_amplitude_given_w",
    "compute_quality_indicators",
    "candidate_w",
    "solve_siso",
    "reduced_objective",
]


@dataclass(frozen=True)
class WdQuality:
    wd_index: int
    rho: float


@dataclass(frozen=True)
class SisoSolution:
    """Optimal SISO design.

    ``k_star`` counts the full-power WDs in ascending-``rho`` order
    (``sorted_order``); the rest use regularized channel inversion.
    ``objective_value`` is the unnormalized (K**2 * MSE) objective.
    """

    tx_coeff: np.ndarray
    denoise_factor: float
    k_star: int
    objective_value: float
    sorted_order: tuple[int, ...]

    @property
    def design(self) -> TransceiverDesign:
        return TransceiverDesign(self.tx_coeff, np.array([self.denoise_factor], dtype=complex))


def _scalar_channels(est_channels, config: SystemConfig) -> np.ndarray:
    if config.num_rx_antennas != 1:
        raise ValueError(f"SISO design needs num_rx_antennas == 1, got {config.num_rx_antennas}")
    est = np.asarray(est_channels, dtype=complex).reshape(-1)
    if est.shape != (config.num_wds,):
        raise ValueError(f"expected {config.num_wds} channel estimates, got {est.size}")
    return est


def optimal_amplitude_given_w(w, est_channel, power, est_error_var):
    """Best transmit amplitude for a fixed denoising factor.

    Returns ``min(sqrt(P), |h| / (w (|h|^2 + s_e)))``. Conventions at the
    edges: ``w == 0`` gives ``sqrt(P)`` and ``h == 0`` gives 0. Broadcasts
    over array arguments.
    """
    w = np.asarray(w, dtype=float)
    mag = np.abs(np.asarray(est_channel))
    power = np.asarray(power, dtype=float)
    s2e = np.asarray(est_error_var, dtype=float)
    if np.any(w < 0) or np.any(power < 0) or np.any(s2e < 0):
        raise ValueError("w, power and est_error_var must be nonnegative")
    cap = np.sqrt(power)
    with np.errstate(divide="ignore", invalid="ignore"):
        inversion = mag / (w * (mag**2 + s2e))
    amp = np.where(w == 0, cap, np.minimum(cap, inversion))
    amp = np.where(mag == 0, 0.0, amp)
    return amp[()] if amp.ndim == 0 else amp


def _rho(mag: np.ndarray, config: SystemConfig) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.sqrt(config.power_budget) * (mag**2 + config.est_error_var) / mag
    return np.where(mag == 0, np.inf, rho)


def compute_quality_indicators(est_channels, config: SystemConfig) -> list[WdQuality]:
    """Channel quality indicators ``rho_k``, sorted ascending (ties by index)."""
    est = _scalar_channels(est_channels, config)
    rho = _rho(np.abs(est), config)
    order = sorted(range(config.num_wds), key=lambda i: (rho[i], i))
    return [WdQuality(i, float(rho[i])) for i in order]


def _residual(mag2: np.ndarray, s2e: np.ndarray) -> np.ndarray:
    # error left by an inverting WD; an unreachable WD (h = 0, s_e = 0) costs 1
    den = mag2 + s2e
    return np.divide(s2e, den, out=np.ones_like(den), where=den > 0)


def candidate_w(k: int, qualities: list[WdQuality], est_channels,
                config: SystemConfig) -> tuple[float, float]:
    """Minimize the interval-``k`` objective over its interval.

    The first ``k`` WDs of ``qualities`` (ascending rho) transmit at full
    power; the others invert. Returns the clamped minimizer and its value.
    An empty interval (only possible for zero-power WDs, rho = 0) yields
    ``(inf, inf)``.
    """
    n = len(qualities)
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    est = _scalar_channels(est_channels, config)
    order = np.array([q.wd_index for q in qualities], dtype=int)
    rho = np.array([q.rho for q in qualities])
    mag = np.abs(est[order])
    p = config.power_budget[order]
    s2e = config.est_error_var[order]

    with np.errstate(divide="ignore"):
        upper = math.inf if k == 0 else 1.0 / rho[k - 1]
        lower = 0.0 if k == n else 1.0 / rho[k]
    if math.isinf(lower):
        return math.inf, math.inf

    full, inv = slice(0, k), slice(k, n)
    num = np.sum(np.sqrt(p[full]) * mag[full])
    den = np.sum(p[full] * (mag[full] ** 2 + s2e[full])) + config.noise_var
    w_tilde = num / den
    w = max(lower, min(w_tilde, upper))

    value = (np.sum((w * np.sqrt(p[full]) * mag[full] - 1.0) ** 2 + w**2 * p[full] * s2e[full])
             + np.sum(_residual(mag[inv] ** 2, s2e[inv]))
             + w**2 * config.noise_var)
    return float(w), float(value)


def solve_siso(est_channels, config: SystemConfig) -> SisoSolution:
    """Globally optimal SISO transmit coefficients and denoising factor."""
    validate_config(config)
    est = _scalar_channels(est_channels, config)
    qualities = compute_quality_indicators(est, config)
    candidates = [candidate_w(k, qualities, est, config) for k in range(config.num_wds + 1)]
    values = np.array([c[1] for c in candidates])
    k_star = int(np.argmin(values))  # first minimum -> smallest k on ties
    w, value = candidates[k_star]

    order = [q.wd_index for q in qualities]
    mag = np.abs(est)
    phase = np.ones(config.num_wds, dtype=complex)
    nz = mag > 0
    phase[nz] = est[nz].conj() / mag[nz]
    cap = np.sqrt(config.power_budget)

    b = np.zeros(config.num_wds, dtype=complex)
    for pos, i in enumerate(order):
        if mag[i] == 0:
            continue
        if pos < k_star:
            b[i] = cap[i] * phase[i]
        else:
            amp = mag[i] / (w * (mag[i] ** 2 + config.est_error_var[i]))
            b[i] = min(cap[i], amp) * phase[i]
    return SisoSolution(tx_coeff=b, denoise_factor=w, k_star=k_star,
                        objective_value=value, sorted_order=tuple(order))


def reduced_objective(w, est_channels, config: SystemConfig):
    """Objective as a function of the denoising factor alone.

    Each WD plays its best amplitude for the given ``w``. Broadcasts over
    an array of ``w`` values.
    """
    est = _scalar_channels(est_channels, config)
    w = np.asarray(w, dtype=float)
    wc = w[..., None]
    amp = optimal_amplitude_given_w(wc, est, config.power_budget, config.est_error_var)
    mag = np.abs(est)
    per_wd = (wc * mag * amp - 1.0) ** 2 + wc**2 * config.est_error_var * amp**2
    return per_wd.sum(axis=-1) + w**2 * config.noise_var
