"""Benchmark transceiver schemes.

* ignoring CSI errors: the proposed optimizer run with every estimation
  error variance set to zero, then scored under the true variances;
* full power: every WD at ``sqrt(P_k)`` with aligned phase;
* channel inversion: amplitudes equalize ``|b_k| ||h_k||`` so the weakest WD
  uses its full budget.

The two fixed-amplitude rules pair with a receive design built the same way
as the proposed one: the closed-form denoising factor for one antenna,
otherwise alternation between phase alignment and the sum-MMSE beamformer.
"""

from __future__ import annotations

import numpy as np

from .model import SystemConfig, validate_config
from .mse import TransceiverDesign
from .simo import (DEFAULT_MAX_ITER, DEFAULT_TOL, _alternate, _channel_matrix, _effective,
                   matched_init, solve_simo_multistart, solve_simo_multistart_batch)
from .siso import solve_siso

__all__ = [
    "DegenerateChannelError",
    "solve_ignoring_csi_errors",
    "ignoring_csi_designs",
    "fixed_rule_designs",
    "full_power_amplitudes",
    "channel_inversion_amplitudes",
    "receive_design_for_fixed_rule",
    "full_power_design",
    "channel_inversion_design",
]


class DegenerateChannelError(ValueError):
    pass


def solve_ignoring_csi_errors(est_channels, config: SystemConfig, n_starts: int = 1,
                              rng: np.random.Generator | None = None) -> TransceiverDesign:
    """Proposed design computed as if the estimates were exact.

    The caller must evaluate the result with the *true* error variances.
    """
    nominal = config.replace(est_error_var=0.0)
    if config.num_rx_antennas == 1:
        return solve_siso(est_channels, nominal).design
    return solve_simo_multistart(est_channels, nominal, n_starts, rng=rng).final_design


def ignoring_csi_designs(est_batch, config: SystemConfig, n_starts: int = 1,
                         rngs=None, **kw) -> list[TransceiverDesign]:
    """:func:`solve_ignoring_csi_errors` for a ``(T, K, N_r)`` stack."""
    nominal = config.replace(est_error_var=0.0)
    if config.num_rx_antennas == 1:
        return [solve_siso(est, nominal).design for est in np.asarray(est_batch)]
    traces = solve_simo_multistart_batch(est_batch, nominal, n_starts, rngs, **kw)
    return [t.final_design for t in traces]


def full_power_amplitudes(est_channels, config: SystemConfig) -> np.ndarray:
    est = _channel_matrix(est_channels, config)
    return np.broadcast_to(np.sqrt(config.power_budget), est.shape[:-1]).copy()


def channel_inversion_amplitudes(est_channels, config: SystemConfig) -> np.ndarray:
    """``sqrt(P) * min_i ||h_i|| / ||h_k||``; needs a common power budget."""
    est = _channel_matrix(est_channels, config)
    norms = np.linalg.norm(est, axis=-1)
    if np.any(norms == 0):
        raise DegenerateChannelError("channel inversion needs every estimate to be nonzero")
    p = config.power_budget
    if not np.all(p == p[0]):
        raise ValueError("channel inversion assumes a common power budget P_k = P")
    return np.sqrt(p[0]) * norms.min(axis=-1, keepdims=True) / norms


_RULES = {"full_power": full_power_amplitudes, "channel_inversion": channel_inversion_amplitudes}


def _aligned(amplitudes: np.ndarray, effective: np.ndarray) -> np.ndarray:
    # coefficient phase cancels that of the effective channel w^H h_k;
    # a vanishing effective channel keeps zero phase
    mag = np.abs(effective)
    safe = np.where(mag > 0, mag, 1.0)
    phase = np.where(mag > 0, effective.conj() / safe, 1.0)
    return amplitudes * phase


def _fixed_rule_beamformers(amp: np.ndarray, est: np.ndarray, config: SystemConfig,
                            tol: float, max_iter: int) -> np.ndarray:
    # est (T, K, N), amp (T, K) -> w (T, N)
    if config.num_rx_antennas == 1:
        mag = np.abs(est[..., 0])
        num = np.sum(mag * amp, axis=-1)
        den = np.sum(amp**2 * (mag**2 + config.est_error_var), axis=-1) + config.noise_var
        return (num / den)[:, None].astype(complex)
    traces = _alternate(est, config, matched_init(est, config),
                        lambda rows, e, w: _aligned(amp[rows], _effective(e, w)),
                        tol, max_iter)
    return np.stack([t.final_design.rx_beamformer for t in traces])


def receive_design_for_fixed_rule(b_rule, est_channels, config: SystemConfig,
                                  tol: float = DEFAULT_TOL,
                                  max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Receive beamformer for a fixed transmit-amplitude rule.

    ``b_rule`` is ``"full_power"``, ``"channel_inversion"`` or an array of
    per-WD amplitudes. One antenna: the closed-form denoising factor.
    Otherwise phase alignment and the sum-MMSE update alternate until the
    relative objective decrease drops below ``tol``.
    """
    validate_config(config)
    est = _channel_matrix(est_channels, config)
    if est.ndim != 2:
        raise ValueError("expected a single (K, N_r) instance")
    if isinstance(b_rule, str):
        amp = _RULES[b_rule](est, config)
    else:
        amp = np.asarray(b_rule, dtype=float).reshape(-1)
    return _fixed_rule_beamformers(amp[None], est[None], config, tol, max_iter)[0]


def fixed_rule_designs(rule: str, est_batch, config: SystemConfig,
                       tol: float = DEFAULT_TOL,
                       max_iter: int = DEFAULT_MAX_ITER) -> list[TransceiverDesign]:
    """Designs of a fixed-amplitude scheme for each instance of a stack.

    Coefficient phases are re-aligned to the final beamformer.
    """
    validate_config(config)
    est = _channel_matrix(est_batch, config)
    if est.ndim == 2:
        est = est[None]
    amp = _RULES[rule](est, config)
    w = _fixed_rule_beamformers(amp, est, config, tol, max_iter)
    b = _aligned(amp, _effective(est, w))
    return [TransceiverDesign(b[i], w[i]) for i in range(est.shape[0])]


def full_power_design(est_channels, config: SystemConfig, **kw) -> TransceiverDesign:
    """Full-power transmission with its matched receive design."""
    return fixed_rule_designs("full_power", est_channels, config, **kw)[0]


def channel_inversion_design(est_channels, config: SystemConfig, **kw) -> TransceiverDesign:
    """Channel-inversion power control with its matched receive design."""
    return fixed_rule_designs("channel_inversion", est_channels, config, **kw)[0]
