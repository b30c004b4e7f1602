"""Closed-form MSE limits.

* High power, one antenna: the optimum tends to the sum of per-WD residuals
  ``s_e / (|h|^2 + s_e)`` over K^2.
* High power, fixed beamformer ``w``: the same with the effective channel
  ``w^H h``, bounded below by the matched-filter value.
* Many antennas, i.i.d. channels: with asymptotically orthogonal channels
  the MSE is a rational function of three aggregate powers and vanishes as
  the antenna count grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig

__all__ = [
    "MassiveMimoTerms",
    "prop1_limit",
    "prop2_limit",
    "massive_mimo_terms",
    "prop3_asymptotic_mse",
    "orthogonal_regime_mse",
]


def _residual_sum(gain_sq: np.ndarray, weight_err: np.ndarray) -> float:
    den = gain_sq + weight_err
    return float(np.sum(np.divide(weight_err, den, out=np.ones_like(den), where=den > 0)))


def prop1_limit(est_channels, config: SystemConfig) -> float:
    """Large-power limit of the optimal single-antenna MSE."""
    if config.num_rx_antennas != 1:
        raise ValueError("prop1_limit needs num_rx_antennas == 1")
    mag_sq = np.abs(np.asarray(est_channels, dtype=complex).reshape(-1)) ** 2
    return _residual_sum(mag_sq, config.est_error_var) / config.num_wds**2


def prop2_limit(w, est_channels, config: SystemConfig) -> tuple[float, float]:
    """Large-power MSE limit under a fixed beamformer, and its lower bound.

    Returns ``(limit, lower_bound)``; the bound replaces ``|w^H h_k|^2 / ||w||^2``
    by ``||h_k||^2`` (Cauchy-Schwarz) and does not depend on ``w``.
    """
    w = np.asarray(w, dtype=complex).reshape(-1)
    w_sq = float(np.vdot(w, w).real)
    if w_sq == 0:
        raise ValueError("beamformer must be nonzero")
    est = np.asarray(est_channels, dtype=complex).reshape(config.num_wds, -1)
    k2 = config.num_wds**2
    gain_sq = np.abs(est @ w.conj()) ** 2
    limit = _residual_sum(gain_sq, w_sq * config.est_error_var) / k2
    lower = _residual_sum(np.sum(np.abs(est) ** 2, axis=1), config.est_error_var) / k2
    assert limit >= lower - 1e-12, (limit, lower)
    return limit, lower


@dataclass(frozen=True)
class MassiveMimoTerms:
    """Aggregate powers: array gain ``alpha``, CSI error ``beta``, noise ``gamma``."""

    alpha: float
    beta: float
    gamma: float


def massive_mimo_terms(tx_coeff, num_rx_antennas: int, channel_var: float,
                       config: SystemConfig) -> MassiveMimoTerms:
    b_sq = np.abs(np.asarray(tx_coeff, dtype=complex)) ** 2
    return MassiveMimoTerms(
        alpha=float(np.sum(b_sq) * num_rx_antennas * channel_var),
        beta=float(np.sum(b_sq * config.est_error_var)),
        gamma=float(config.noise_var),
    )


def prop3_asymptotic_mse(tx_coeff, num_rx_antennas: int, channel_var: float,
                         config: SystemConfig) -> float:
    """Many-antenna MSE ``((b+g)^2 + a b + a g) / (K^2 (a+b+g)^2)``.

    ``channel_var`` is the common variance of the channel estimates. An
    all-zero ``tx_coeff`` lies outside the regime the expression describes
    and is rejected.
    """
    if channel_var <= 0 or num_rx_antennas < 1:
        raise ValueError("need channel_var > 0 and num_rx_antennas >= 1")
    if not np.any(np.asarray(tx_coeff)):
        raise ValueError("all-zero transmit coefficients are outside the asymptotic regime")
    t = massive_mimo_terms(tx_coeff, num_rx_antennas, channel_var, config)
    a, b, g = t.alpha, t.beta, t.gamma
    return ((b + g) ** 2 + a * b + a * g) / (config.num_wds**2 * (a + b + g) ** 2)


def orthogonal_regime_mse(tx_coeff, num_rx_antennas: int, channel_var: float,
                          config: SystemConfig) -> float:
    """Many-antenna MSE with each WD's own array gain.

    Under exact orthogonality the sum-MMSE matrix scales ``h_k b_k`` by
    ``alpha_k + beta + gamma`` with ``alpha_k = |b_k|^2 N_r s_h``, giving
    ``sum_k (beta + gamma) / (alpha_k + beta + gamma) / K^2``. Agrees with
    :func:`prop3_asymptotic_mse` for a single WD; for several WDs the latter
    pools the array gain of all WDs into every term.
    """
    if channel_var <= 0 or num_rx_antennas < 1:
        raise ValueError("need channel_var > 0 and num_rx_antennas >= 1")
    b_sq = np.abs(np.asarray(tx_coeff, dtype=complex)) ** 2
    beta = float(np.sum(b_sq * config.est_error_var))
    rest = beta + config.noise_var
    return float(np.sum(rest / (b_sq * num_rx_antennas * channel_var + rest))) / config.num_wds**2
