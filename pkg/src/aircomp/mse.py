"""Computation MSE of an AirComp transceiver design.

The estimator of the average ``f = mean(s)`` is ``f_hat = w^H y / K``.
Conditioned on the channel estimate, its MSE splits into signal
misalignment, CSI-error and noise contributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemConfig

__all__ = [
    "FEASIBILITY_SLACK",
    "TransceiverDesign",
    "MseBreakdown",
    "analytic_mse",
    "objective_p1",
    "empirical_mse",
]

FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class TransceiverDesign:
    """Transmit coefficients ``b`` (one per WD) and receive beamformer ``w``."""

    tx_coeff: np.ndarray
    rx_beamformer: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tx_coeff", np.atleast_1d(np.asarray(self.tx_coeff, dtype=complex)))
        object.__setattr__(self, "rx_beamformer",
                           np.atleast_1d(np.asarray(self.rx_beamformer, dtype=complex)))

    def is_feasible(self, config: SystemConfig) -> bool:
        power = np.abs(self.tx_coeff) ** 2
        return bool(np.all(power <= config.power_budget * (1 + FEASIBILITY_SLACK) + 1e-300))


@dataclass(frozen=True)
class MseBreakdown:
    """The three error terms (unnormalized) and the total MSE.

    ``total = (misalignment + csi_related + noise) / K**2``.
    """

    misalignment: float
    csi_related: float
    noise: float
    total: float


def _check_dims(design: TransceiverDesign, est: np.ndarray, config: SystemConfig) -> np.ndarray:
    est = np.asarray(est, dtype=complex)
    if est.ndim == 1:
        est = est[:, None]
    k, n = config.num_wds, config.num_rx_antennas
    if est.shape != (k, n):
        raise ValueError(f"est_channels has shape {est.shape}, expected {(k, n)}")
    if design.tx_coeff.shape != (k,):
        raise ValueError(f"tx_coeff has length {design.tx_coeff.size}, expected {k}")
    if design.rx_beamformer.shape != (n,):
        raise ValueError(f"rx_beamformer has length {design.rx_beamformer.size}, expected {n}")
    return est


def analytic_mse(design: TransceiverDesign, est_channels, config: SystemConfig) -> MseBreakdown:
    """Exact computation MSE given the channel estimates.

    The expectation runs over the messages and the estimation errors;
    the true channel is ``est - error`` with ``error ~ CN(0, s_ek I)``.
    """
    est = _check_dims(design, est_channels, config)
    w, b = design.rx_beamformer, design.tx_coeff
    gains = est @ w.conj()  # w^H h_k
    w_sq = float(np.vdot(w, w).real)
    b_sq = np.abs(b) ** 2
    misalignment = float(np.sum(np.abs(gains * b - 1.0) ** 2))
    csi = float(w_sq * np.sum(config.est_error_var * b_sq))
    noise = w_sq * config.noise_var
    total = (misalignment + csi + noise) / config.num_wds**2
    return MseBreakdown(misalignment, csi, noise, total)


def objective_p1(design: TransceiverDesign, est_channels, config: SystemConfig) -> float:
    """Unnormalized objective: ``K**2`` times the total MSE."""
    m = analytic_mse(design, est_channels, config)
    return m.misalignment + m.csi_related + m.noise


def empirical_mse(design: TransceiverDesign, est_channels, config: SystemConfig,
                  n_samples: int, rng: np.random.Generator,
                  batch_size: int = 20_000) -> tuple[float, float]:
    """Monte Carlo estimate of the computation MSE and its standard error.

    Each sample draws unit-variance CSCG messages, fresh estimation errors
    and receiver noise, forms the true channels as ``est - error`` and
    pushes them through the received-signal model.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    est = _check_dims(design, est_channels, config)
    k, n = est.shape
    w, b = design.rx_beamformer, design.tx_coeff
    err_scale = np.sqrt(config.est_error_var / 2.0)[None, :, None]
    noise_scale = np.sqrt(config.noise_var / 2.0)

    sq_err = np.empty(n_samples)
    done = 0
    while done < n_samples:
        m = min(batch_size, n_samples - done)
        s = (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2.0)
        e = err_scale * (rng.standard_normal((m, k, n)) + 1j * rng.standard_normal((m, k, n)))
        z = noise_scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
        h = est[None, :, :] - e
        y = np.einsum("mkn,k,mk->mn", h, b, s) + z
        f_hat = (y @ w.conj()) / k
        f = s.mean(axis=1)
        sq_err[done:done + m] = np.abs(f_hat - f) ** 2
        done += m

    mean = float(sq_err.mean())
    std_error = float(sq_err.std(ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else float("inf")
    return mean, std_error
