"""Transceiver design for over-the-air computation under imperfect CSI.

Minimizes the mean squared error of a sum computed over the air by K
single-antenna devices towards an access point with one or more antennas,
when the receiver only knows noisy channel estimates.
"""

from .asymptotics import (orthogonal_regime_mse, prop1_limit, prop2_limit,
                          prop3_asymptotic_mse)
from .baselines import (channel_inversion_design, full_power_design,
                        solve_ignoring_csi_errors)
from .harness import SweepResult, SweepSpec, figure_spec, run_sweep
from .model import (ChannelInstance, ConfigError, SystemConfig, derive_rng,
                    generate_channel_instance, load_scenario)
from .mse import MseBreakdown, TransceiverDesign, analytic_mse, empirical_mse
from .simo import AoTrace, solve_simo, solve_simo_multistart
from .siso import SisoSolution, solve_siso

__version__ = "0.1.0"

__all__ = [
    "AoTrace", "ChannelInstance", "ConfigError", "MseBreakdown", "SisoSolution",
    "SweepResult", "SweepSpec", "SystemConfig", "TransceiverDesign",
    "analytic_mse", "channel_inversion_design", "derive_rng", "empirical_mse",
    "figure_spec", "full_power_design", "generate_channel_instance", "load_scenario",
    "orthogonal_regime_mse", "prop1_limit", "prop2_limit", "prop3_asymptotic_mse",
    "run_sweep", "solve_ignoring_csi_errors", "solve_simo", "solve_simo_multistart",
    "solve_siso",
]
