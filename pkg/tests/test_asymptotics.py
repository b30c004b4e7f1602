"""Tests for the closed-form MSE limits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aircomp.asymptotics import (massive_mimo_terms, orthogonal_regime_mse, prop1_limit,
                                 prop2_limit, prop3_asymptotic_mse)
from aircomp.model import SystemConfig, derive_rng, generate_channel_instance
from aircomp.mse import TransceiverDesign, analytic_mse
from aircomp.simo import optimal_b_given_w, optimal_w_given_b, solve_simo
from aircomp.siso import solve_siso

from conftest import make_case


@pytest.fixture(scope="module")
def iid_regime():
    """K=20, N_r=256, unit channel variance, s_e=0.1, s_z=1, unit coefficients."""
    config = SystemConfig.uniform(20, 256, power=1.0, est_error_var=0.1, noise_var=1.0)
    ests = [generate_channel_instance(config, derive_rng(77, i)).est_channel for i in range(50)]
    return config, ests


class TestHighPowerSingleAntenna:
    def test_perfect_csi_limit_is_zero(self):
        config, est = make_case(1, num_wds=4, num_rx_antennas=1, est_error_var=0.0)
        assert prop1_limit(est, config) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_solver_reaches_limit(self, seed):
        config, est = make_case(seed, num_wds=20, num_rx_antennas=1, power=1e16, est_error_var=0.1)
        total = analytic_mse(solve_siso(est, config).design, est, config).total
        assert total == pytest.approx(prop1_limit(est, config), abs=1e-6)

    def test_hand_value(self):
        # one WD, |h|^2 = 1, s_e = 1: residual 1/2
        config = SystemConfig.uniform(1, 1, est_error_var=1.0)
        assert prop1_limit(np.array([1j]), config) == pytest.approx(0.5)

    def test_agrees_with_fixed_beamformer_limit(self):
        config, est = make_case(2, num_wds=6, num_rx_antennas=1, est_error_var=0.3)
        assert prop2_limit([0.7], est, config)[0] == pytest.approx(prop1_limit(est, config))

    def test_multi_antenna_rejected(self):
        config, est = make_case(3)
        with pytest.raises(ValueError):
            prop1_limit(est, config)


class TestHighPowerFixedBeamformer:
    def test_parallel_reaches_bound(self):
        config = SystemConfig.uniform(1, 3, est_error_var=0.2)
        h = np.array([[1.0, 1j, -0.5]])
        limit, lower = prop2_limit(h[0] * 2.5, h, config)
        assert limit == pytest.approx(lower, rel=1e-14)

    def test_orthogonal_gives_one(self):
        config = SystemConfig.uniform(1, 2, est_error_var=0.2)
        limit, _ = prop2_limit(np.array([0.0, 1.0]), np.array([[1.0, 0.0]]), config)
        assert limit == 1.0

    def test_zero_beamformer_rejected(self):
        config, est = make_case(4)
        with pytest.raises(ValueError):
            prop2_limit(np.zeros(2), est, config)

    @pytest.mark.parametrize("seed", range(5))
    def test_power_control_reaches_limit(self, seed):
        config, est = make_case(seed, num_wds=10, num_rx_antennas=4, power=1e16, est_error_var=0.2)
        rng = derive_rng(seed, 9)
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w *= 1e-4 / np.linalg.norm(w)  # noise term ||w||^2 s_z vanishes as the scale shrinks
        total = analytic_mse(TransceiverDesign(optimal_b_given_w(w, est, config), w), est, config).total
        assert total == pytest.approx(prop2_limit(w, est, config)[0], abs=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 100_000), n=st.integers(1, 6), s2e=st.floats(0.0, 1.0),
           scale=st.floats(1e-3, 1e3))
    def test_bound_and_scale_invariance(self, seed, n, s2e, scale):
        config, est = make_case(seed, num_wds=4, num_rx_antennas=n, est_error_var=s2e)
        rng = derive_rng(seed, 1)
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        limit, lower = prop2_limit(w, est, config)
        assert limit >= lower - 1e-12
        assert prop2_limit(scale * w, est, config)[0] == pytest.approx(limit, rel=1e-9)


class TestManyAntennas:
    def test_terms(self):
        config = SystemConfig.uniform(2, 8, est_error_var=0.1, noise_var=2.0)
        t = massive_mimo_terms(np.array([1.0, 2j]), 8, 0.5, config)
        assert (t.alpha, t.beta, t.gamma) == pytest.approx((20.0, 0.5, 2.0))

    def test_single_wd_is_exact(self):
        # one WD: h is an eigenvector of the MMSE matrix, so the expression is exact
        config = SystemConfig.uniform(1, 16, est_error_var=0.2, noise_var=0.7)
        est = generate_channel_instance(config, derive_rng(5)).est_channel
        b = np.array([1.3 * np.exp(0.4j)])
        w = optimal_w_given_b(b, est, config)
        exact = analytic_mse(TransceiverDesign(b, w), est, config).total
        s2h = float(np.sum(np.abs(est) ** 2)) / 16
        assert prop3_asymptotic_mse(b, 16, s2h, config) == pytest.approx(exact, rel=1e-12)
        assert orthogonal_regime_mse(b, 16, s2h, config) == pytest.approx(exact, rel=1e-12)

    def test_strictly_decreasing_in_antennas(self):
        config = SystemConfig.uniform(5, 1, est_error_var=0.1)
        b = np.ones(5)
        values = [prop3_asymptotic_mse(b, n, 1.0, config) for n in (1, 2, 8, 64, 1024, 2**20)]
        assert all(a > c for a, c in zip(values, values[1:]))
        assert values[-1] < 1e-6

    def test_zero_coefficients_rejected(self):
        config = SystemConfig.uniform(3, 4)
        with pytest.raises(ValueError, match="all-zero"):
            prop3_asymptotic_mse(np.zeros(3), 4, 1.0, config)

    def test_orthogonal_expression_matches_simulation(self, iid_regime):
        # fixed unit coefficients with the sum-MMSE beamformer, averaged over draws
        config, ests = iid_regime
        b = np.ones(20)
        sim = np.mean([analytic_mse(TransceiverDesign(b, optimal_w_given_b(b, e, config)), e,
                                    config).total for e in ests])
        assert orthogonal_regime_mse(b, 256, 1.0, config) == pytest.approx(sim, rel=0.2)

    def test_printed_expression_within_20pct_of_solver(self, iid_regime):
        # the aggregate-alpha expression as stated for this regime; it pools
        # all WDs' array gain into each term and comes out ~400x too small
        config, ests = iid_regime
        sim = np.mean([analytic_mse(solve_simo(e, config).final_design, e, config).total
                       for e in ests])
        assert prop3_asymptotic_mse(np.ones(20), 256, 1.0, config) == pytest.approx(sim, rel=0.2)
