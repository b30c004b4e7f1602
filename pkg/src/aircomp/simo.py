"""Alternating optimization for a multi-antenna AP (N_r >= 1).

Each iteration solves the per-WD power control exactly for the current
beamformer, then the sum-MMSE beamformer exactly for the new coefficients,
so the objective never increases.

The kernels work on stacks of independent instances (leading batch axis)
so Monte Carlo sweeps can advance many channel draws at once; every
instance keeps its own stopping test and history.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import SystemConfig, validate_config
from .mse import TransceiverDesign

__all__ = [
    "DegenerateBeamformerError",
    "AoTrace",
    "optimal_b_given_w",
    "optimal_w_given_b",
    "matched_init",
    "random_unit_vector",
    "solve_simo",
    "solve_simo_batch",
    "solve_simo_multistart",
    "solve_simo_multistart_batch",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 1000


class DegenerateBeamformerError(ValueError):
    """Raised when a power-control step receives an all-zero beamformer."""


@dataclass
class AoTrace:
    """Result of one alternating-optimization run.

    ``objective_history[i]`` is the unnormalized objective after iteration
    ``i + 1`` (power-control step followed by beamformer step).
    """

    iterations: int
    objective_history: list[float]
    converged: bool
    final_design: TransceiverDesign
    start_index: int = field(default=0)

    @property
    def objective(self) -> float:
        return self.objective_history[-1]


def _channel_matrix(est_channels, config: SystemConfig) -> np.ndarray:
    est = np.asarray(est_channels, dtype=complex)
    if est.ndim == 1 and config.num_rx_antennas == 1:
        est = est[:, None]
    if est.shape[-2:] != (config.num_wds, config.num_rx_antennas) or est.ndim not in (2, 3):
        raise ValueError(f"est_channels has shape {est.shape}, "
                         f"expected (..., {config.num_wds}, {config.num_rx_antennas})")
    return est


# -- batched kernels: est (..., K, N), w (..., N), b (..., K) ------------------

def _effective(est: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``w^H h_k`` for every WD."""
    return (est @ w.conj()[..., None])[..., 0]


def _power_control(est: np.ndarray, w: np.ndarray, config: SystemConfig) -> np.ndarray:
    w_sq = np.sum(w.real**2 + w.imag**2, axis=-1, keepdims=True)
    if np.any(w_sq == 0.0):
        raise DegenerateBeamformerError("beamformer is the zero vector")
    g = _effective(est, w)
    mag = np.abs(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = np.minimum(np.sqrt(config.power_budget),
                         mag / (mag**2 + w_sq * config.est_error_var))
        b = np.where(mag > 0, amp * g.conj() / mag, 0.0)
    return b.astype(complex)


def _hpd_solve(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # Hermitian positive-definite solve through a Cholesky factor (batched)
    chol = np.linalg.cholesky(m)
    y = np.linalg.solve(chol, rhs[..., None])
    return np.linalg.solve(np.swapaxes(chol, -1, -2).conj(), y)[..., 0]


def _sum_mmse(est: np.ndarray, b: np.ndarray, config: SystemConfig) -> np.ndarray:
    b_sq = b.real**2 + b.imag**2
    k, n = est.shape[-2:]
    est_t = np.swapaxes(est, -1, -2)
    load = np.sum(b_sq * config.est_error_var, axis=-1) + config.noise_var
    if n <= k:
        a = (est_t * b_sq[..., None, :]) @ est.conj()
        a[..., np.arange(n), np.arange(n)] += load[..., None]
        return _hpd_solve(a, (est_t @ b[..., None])[..., 0])
    # more antennas than WDs: the push-through identity
    # (cI + U D U^H)^-1 U D^1/2 = U D^1/2 (cI + D^1/2 U^H U D^1/2)^-1
    # gives the same w from a K x K Hermitian system
    mag = np.sqrt(b_sq)
    safe = np.where(mag > 0, mag, 1.0)
    phase = np.where(mag > 0, b / safe, 0.0)
    gram = est.conj() @ est_t
    m = mag[..., :, None] * gram * mag[..., None, :]
    m[..., np.arange(k), np.arange(k)] += load[..., None]
    x = _hpd_solve(m, phase)
    return (est_t @ (mag * x)[..., None])[..., 0]


def _objective(est: np.ndarray, b: np.ndarray, w: np.ndarray, config: SystemConfig):
    # same value as mse.objective_p1, without the validation overhead
    d = _effective(est, w) * b - 1.0
    w_sq = np.sum(w.real**2 + w.imag**2, axis=-1)
    b_sq = b.real**2 + b.imag**2
    return (np.sum(d.real**2 + d.imag**2, axis=-1)
            + w_sq * (np.sum(config.est_error_var * b_sq, axis=-1) + config.noise_var))


def _alternate(est: np.ndarray, config: SystemConfig, w: np.ndarray,
               b_step: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
               tol: float, max_iter: int) -> list[AoTrace]:
    """Run ``b = b_step(rows, est[rows], w[rows])`` / sum-MMSE ``w`` on a stack.

    ``est`` is ``(T, K, N)`` and ``w`` the ``(T, N)`` initial beamformers.
    Instances stop independently; ``rows`` lists the ones still running.
    """
    t = est.shape[0]
    w = np.array(w, dtype=complex)
    b = b_step(np.arange(t), est, w)
    hist = np.full((max_iter, t), np.nan)
    iterations = np.zeros(t, dtype=int)
    converged = np.zeros(t, dtype=bool)
    active = np.arange(t)
    for it in range(max_iter):
        e = est[active]
        if it:
            b[active] = b_step(active, e, w[active])
        w_new = _sum_mmse(e, b[active], config)
        w[active] = w_new
        values = _objective(e, b[active], w_new, config)
        hist[it, active] = values
        iterations[active] = it + 1
        stop = ~np.any(w_new, axis=-1)  # every WD silent: nothing left to improve
        if it:
            prev = hist[it - 1, active]
            stop |= prev - values < tol * prev
        converged[active[stop]] = True
        active = active[~stop]
        if active.size == 0:
            break
    return [AoTrace(iterations=int(iterations[i]),
                    objective_history=hist[:iterations[i], i].tolist(),
                    converged=bool(converged[i]),
                    final_design=TransceiverDesign(b[i].copy(), w[i].copy()))
            for i in range(t)]


# -- public API ---------------------------------------------------------------

def optimal_b_given_w(w, est_channels, config: SystemConfig) -> np.ndarray:
    """Per-WD optimal transmit coefficients for a fixed beamformer.

    Threshold rule: full power, or regularized inversion of the effective
    channel ``w^H h_k`` when that needs less power. A WD whose effective
    channel vanishes stays silent.
    """
    est = _channel_matrix(est_channels, config)
    return _power_control(est, np.asarray(w, dtype=complex).reshape(-1), config)


def optimal_w_given_b(tx_coeff, est_channels, config: SystemConfig) -> np.ndarray:
    """Sum-MMSE receive beamformer for fixed transmit coefficients.

    Solves ``A w = r`` with
    ``A = sum |b_k|^2 (h_k h_k^H + s_ek I) + s_z I`` and ``r = sum h_k b_k``
    by Cholesky factorization.
    """
    est = _channel_matrix(est_channels, config)
    b = np.asarray(tx_coeff, dtype=complex).reshape(-1)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(est))):
        raise ValueError("non-finite transmit coefficients or channels")
    return _sum_mmse(est, b, config)


def matched_init(est_channels, config: SystemConfig) -> np.ndarray:
    """Unit vector along the sum of the channel estimates.

    Falls back to the first basis vector when the sum vanishes. Accepts a
    stack of instances.
    """
    est = _channel_matrix(est_channels, config)
    total = est.sum(axis=-2)
    norm = np.linalg.norm(total, axis=-1, keepdims=True)
    basis = np.zeros_like(total)
    basis[..., 0] = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(norm > 0, total / norm, basis)


def random_unit_vector(dim: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    shape = (dim,) if size is None else (size, dim)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _initial_beamformers(est: np.ndarray, config: SystemConfig, init, rng) -> np.ndarray:
    if isinstance(init, str):
        if init == "matched":
            return matched_init(est, config)
        if init == "random":
            if rng is None:
                raise ValueError("init='random' needs an rng")
            return random_unit_vector(config.num_rx_antennas, rng, size=est.shape[0])
        raise ValueError(f"unknown init strategy {init!r}")
    w = np.asarray(init, dtype=complex)
    w = np.broadcast_to(w, (est.shape[0], config.num_rx_antennas))
    if np.any(~np.any(w, axis=-1)):
        raise DegenerateBeamformerError("initial beamformer is the zero vector")
    return w


def solve_simo_batch(est_batch, config: SystemConfig, init="matched",
                     tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                     rng: np.random.Generator | None = None) -> list[AoTrace]:
    """:func:`solve_simo` over a ``(T, K, N_r)`` stack of channel estimates."""
    validate_config(config)
    est = _channel_matrix(est_batch, config)
    if est.ndim != 3:
        raise ValueError("solve_simo_batch expects a (T, K, N_r) array")
    w0 = _initial_beamformers(est, config, init, rng)
    return _alternate(est, config, w0, lambda _, e, w: _power_control(e, w, config), tol, max_iter)


def solve_simo(est_channels, config: SystemConfig, init="matched",
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
               rng: np.random.Generator | None = None) -> AoTrace:
    """Alternate power control and beamforming until the objective settles.

    Parameters
    ----------
    init : {"matched", "random"} or array
        Initial beamformer. ``"matched"`` points along the sum channel;
        ``"random"`` draws a unit vector from ``rng``.
    tol : float
        Stop once the relative objective decrease of an iteration is below
        ``tol``.
    max_iter : int
        Iteration cap.
    """
    est = _channel_matrix(est_channels, config)
    if est.ndim != 2:
        raise ValueError("use solve_simo_batch for stacked instances")
    return solve_simo_batch(est[None], config, init, tol, max_iter, rng)[0]


def solve_simo_multistart_batch(est_batch, config: SystemConfig, n_starts: int,
                                rngs, tol: float = DEFAULT_TOL,
                                max_iter: int = DEFAULT_MAX_ITER) -> list[AoTrace]:
    """Multistart AO for each instance of a ``(T, K, N_r)`` stack.

    Instance ``i`` draws its ``n_starts - 1`` random inits from ``rngs[i]``;
    start 0 is the matched init. All ``T * n_starts`` runs advance together.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    validate_config(config)
    est = _channel_matrix(est_batch, config)
    t = est.shape[0]
    w0 = matched_init(est, config)[:, None, :]
    if n_starts > 1:
        if rngs is None or len(rngs) != t:
            raise ValueError("random starts need one rng per instance")
        extra = np.stack([random_unit_vector(config.num_rx_antennas, r, size=n_starts - 1)
                          for r in rngs])
        w0 = np.concatenate([w0, extra], axis=1)
    stack = np.repeat(est, n_starts, axis=0)
    traces = _alternate(stack, config, w0.reshape(t * n_starts, -1),
                        lambda _, e, w: _power_control(e, w, config), tol, max_iter)
    best = []
    for i in range(t):
        group = traces[i * n_starts:(i + 1) * n_starts]
        j = min(range(n_starts), key=lambda s: (group[s].objective, s))
        group[j].start_index = j
        best.append(group[j])
    return best


def solve_simo_multistart(est_channels, config: SystemConfig, n_starts: int = 8,
                          rng: np.random.Generator | None = None,
                          tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> AoTrace:
    """Best of ``n_starts`` AO runs: the matched init plus random unit inits.

    Ties go to the lowest start index, so ``n_starts == 1`` reproduces
    :func:`solve_simo` with the default init.
    """
    est = _channel_matrix(est_channels, config)
    if est.ndim != 2:
        raise ValueError("use solve_simo_multistart_batch for stacked instances")
    if n_starts > 1 and rng is None:
        raise ValueError("random starts need an rng")
    return solve_simo_multistart_batch(est[None], config, n_starts, [rng], tol, max_iter)[0]
