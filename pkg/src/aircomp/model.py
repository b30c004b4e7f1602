"""System configuration, scenario files and random channel generation.

Channels are stored as ``(K, N_r)`` complex arrays, one row per wireless
device (WD). The AP only sees the estimate ``est = true + error``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

__all__ = [
    "ConfigError",
    "SystemConfig",
    "ChannelInstance",
    "validate_config",
    "sample_cscg_vector",
    "generate_channel_instance",
    "derive_rng",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "DEFAULT_CHANNEL_VAR_RANGE",
]

DEFAULT_CHANNEL_VAR_RANGE = (0.5, 1.5)

_PER_WD_FIELDS = ("power_budget", "est_error_var", "channel_var")


class ConfigError(ValueError):
    """Invalid scenario parameter. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """Scenario parameters of the AirComp system.

    Per-WD fields are length-K float arrays (read-only). Powers are linear.
    Construction does not validate; call :func:`validate_config`.
    """

    num_wds: int
    num_rx_antennas: int
    power_budget: np.ndarray
    est_error_var: np.ndarray
    noise_var: float
    channel_var: np.ndarray

    def __post_init__(self):
        for name in _PER_WD_FIELDS:
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))
        object.__setattr__(self, "noise_var", float(self.noise_var))

    @classmethod
    def uniform(cls, num_wds: int, num_rx_antennas: int = 1, power: float = 1.0,
                est_error_var: float = 0.0, noise_var: float = 1.0,
                channel_var=1.0) -> "SystemConfig":
        """Common power and error variance for all WDs; scalars broadcast."""
        k = int(num_wds)
        return cls(
            num_wds=k,
            num_rx_antennas=int(num_rx_antennas),
            power_budget=np.full(k, float(power)),
            est_error_var=np.full(k, float(est_error_var)),
            noise_var=noise_var,
            channel_var=np.broadcast_to(np.asarray(channel_var, dtype=float), (k,)),
        )

    def replace(self, **changes) -> "SystemConfig":
        """Copy with fields replaced; scalar per-WD values broadcast to K."""
        k = int(changes.get("num_wds", self.num_wds))
        for name in _PER_WD_FIELDS:
            if name in changes and np.ndim(changes[name]) == 0:
                changes[name] = np.full(k, float(changes[name]))
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "num_wds": self.num_wds,
            "num_rx_antennas": self.num_rx_antennas,
            "power_budget": self.power_budget.tolist(),
            "est_error_var": self.est_error_var.tolist(),
            "noise_var": self.noise_var,
            "channel_var": self.channel_var.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, SystemConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass(frozen=True)
class ChannelInstance:
    """One realization of true channels, estimates and estimation errors."""

    true_channel: np.ndarray
    est_channel: np.ndarray
    error: np.ndarray

    @property
    def num_wds(self) -> int:
        return self.est_channel.shape[0]

    @property
    def num_rx_antennas(self) -> int:
        return self.est_channel.shape[1]


def validate_config(config: SystemConfig) -> None:
    """Raise :class:`ConfigError` naming the first violated invariant."""
    if int(config.num_wds) != config.num_wds or config.num_wds < 1:
        raise ConfigError("num_wds", f"must be a positive integer, got {config.num_wds!r}")
    if int(config.num_rx_antennas) != config.num_rx_antennas or config.num_rx_antennas < 1:
        raise ConfigError("num_rx_antennas",
                          f"must be a positive integer, got {config.num_rx_antennas!r}")
    for name in _PER_WD_FIELDS:
        arr = getattr(config, name)
        if arr.shape != (config.num_wds,):
            raise ConfigError(name, f"dimension mismatch: expected length {config.num_wds}, "
                                    f"got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError(name, "values must be finite")
        if np.any(arr < 0):
            raise ConfigError(name, "negative values are not allowed")
    if not np.isfinite(config.noise_var) or config.noise_var <= 0:
        raise ConfigError("noise_var", f"must be positive and finite, got {config.noise_var!r}")


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for work unit ``keys`` under ``master_seed``.

    Streams depend only on ``(master_seed, keys)``, never on execution order.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(seq)


def sample_cscg_vector(dim: int, variance: float, rng: np.random.Generator,
                       size: int | tuple | None = None) -> np.ndarray:
    """Draw CN(0, variance * I) vectors of length ``dim``.

    Real and imaginary parts are independent with variance ``variance / 2``.
    With ``size`` given, the result has shape ``(*size, dim)``.
    """
    if int(dim) != dim or dim < 1:
        raise ValueError(f"invalid dimension {dim!r}; must be >= 1")
    if variance < 0:
        raise ValueError(f"variance must be nonnegative, got {variance!r}")
    lead = () if size is None else (size if isinstance(size, tuple) else (size,))
    shape = lead + (int(dim),)
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channel_instance(config: SystemConfig, rng: np.random.Generator) -> ChannelInstance:
    """Draw h_k ~ CN(0, s_hk I) and e_k ~ CN(0, s_ek I); estimate = h + e."""
    validate_config(config)
    k, n = config.num_wds, config.num_rx_antennas
    unit_h = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    unit_e = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    h = np.sqrt(config.channel_var / 2.0)[:, None] * unit_h
    e = np.sqrt(config.est_error_var / 2.0)[:, None] * unit_e
    return ChannelInstance(true_channel=h, est_channel=h + e, error=e)


# -- scenario files ---------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Parsed scenario file: config, seed and an optional fixed estimate."""

    config: SystemConfig
    master_seed: int
    est_channels: np.ndarray | None = None


def _parse_complex(value, field: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(field, "complex entries must be numbers or [re, im] pairs")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(float(value))


def _coerce_override(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def parse_scenario(doc: Mapping[str, Any], overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Build a validated :class:`Scenario` from a flat key-value document.

    Per-WD fields accept a length-K list or a scalar (broadcast). The
    optional ``est_channels`` is a list of K rows, each a list of N_r
    entries (number or ``[re, im]``); a bare number is allowed for N_r = 1.
    When
    ``channel_var`` is absent it is drawn uniformly from
    ``channel_var_range`` (default [0.5, 1.5]) using ``master_seed``.
    ``overrides`` values may be JSON strings (as given on a command line).
    """
    doc = dict(doc)
    for key, value in (overrides or {}).items():
        doc[key] = _coerce_override(value) if isinstance(value, str) else value

    known = {"num_wds", "num_rx_antennas", "noise_var", "master_seed",
             "channel_var_range", "est_channels", *_PER_WD_FIELDS}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")

    for req in ("num_wds", "num_rx_antennas", "power_budget", "est_error_var", "noise_var"):
        if req not in doc:
            raise ConfigError(req, "missing required field")

    def as_int(name):
        value = doc[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(name, f"must be an integer, got {value!r}")
        return int(value)

    k = as_int("num_wds")
    n = as_int("num_rx_antennas")
    seed = as_int("master_seed") if "master_seed" in doc else 0
    if k < 1:
        raise ConfigError("num_wds", "must be >= 1")

    def per_wd(name):
        value = doc[name]
        try:
            arr = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(name, f"not numeric: {value!r}") from None
        if arr.ndim == 0:
            return np.full(k, float(arr))
        if arr.ndim != 1:
            raise ConfigError(name, "must be a scalar or a flat list")
        return arr

    if "channel_var" in doc:
        channel_var = per_wd("channel_var")
    else:
        lo, hi = doc.get("channel_var_range", DEFAULT_CHANNEL_VAR_RANGE)
        if not 0 <= lo <= hi:
            raise ConfigError("channel_var_range", "need 0 <= v_min <= v_max")
        channel_var = derive_rng(seed, 0xC4A7).uniform(lo, hi, size=k)

    try:
        noise_var = float(doc["noise_var"])
    except (TypeError, ValueError):
        raise ConfigError("noise_var", f"not numeric: {doc['noise_var']!r}") from None

    config = SystemConfig(
        num_wds=k,
        num_rx_antennas=n,
        power_budget=per_wd("power_budget"),
        est_error_var=per_wd("est_error_var"),
        noise_var=noise_var,
        channel_var=channel_var,
    )
    validate_config(config)

    est = None
    if doc.get("est_channels") is not None:
        rows = doc["est_channels"]
        if not isinstance(rows, list) or len(rows) != k:
            raise ConfigError("est_channels", f"expected {k} rows")
        est = np.empty((k, n), dtype=complex)
        for i, row in enumerate(rows):
            # a bare number is a one-antenna row; otherwise N_r entries,
            # each a number or an [re, im] pair
            entries = row if isinstance(row, list) else [row]
            if len(entries) != n:
                raise ConfigError("est_channels", f"row {i} must have {n} entries")
            est[i] = [_parse_complex(v, "est_channels") for v in entries]
    return Scenario(config=config, master_seed=seed, est_channels=est)


def load_scenario(path: str | Path, overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Read a JSON scenario file. Missing/unparsable files raise ConfigError."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError("scenario", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("scenario", f"invalid JSON in {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("scenario", "top level must be an object")
    return parse_scenario(doc, overrides)
