"""Tests for configuration, seeding, channel sampling and scenario files."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aircomp.model import (ConfigError, SystemConfig, derive_rng, generate_channel_instance,
                           load_scenario, parse_scenario, sample_cscg_vector, validate_config)

BASE = {"num_wds": 3, "num_rx_antennas": 2, "power_budget": 1.0, "est_error_var": 0.1,
        "noise_var": 1.0}


class TestSystemConfig:
    def test_uniform_broadcasts(self):
        c = SystemConfig.uniform(4, 3, power=2.0, est_error_var=0.2, noise_var=0.5)
        assert c.power_budget.shape == (4,)
        assert np.all(c.est_error_var == 0.2)
        assert np.all(c.channel_var == 1.0)

    def test_arrays_are_read_only(self):
        c = SystemConfig.uniform(2)
        with pytest.raises(ValueError):
            c.power_budget[0] = 5.0

    def test_replace_and_equality(self):
        c = SystemConfig.uniform(3, 2, est_error_var=0.2)
        d = c.replace(est_error_var=0.0)
        assert np.all(d.est_error_var == 0.0)
        assert d != c
        assert d.replace(est_error_var=0.0) == d
        assert c.to_dict()["num_wds"] == 3

    @pytest.mark.parametrize("field,changes", [
        ("power_budget", {"power_budget": np.array([1.0, 1.0])}),
        ("est_error_var", {"est_error_var": np.array([0.1, -0.1, 0.1])}),
        ("noise_var", {"noise_var": 0.0}),
        ("channel_var", {"channel_var": np.array([1.0, np.nan, 1.0])}),
    ])
    def test_validation_names_field(self, field, changes):
        c = SystemConfig.uniform(3, 1)
        with pytest.raises(ConfigError) as info:
            validate_config(c.replace(**changes))
        assert info.value.field == field


class TestSeeding:
    def test_same_keys_same_stream(self):
        a = derive_rng(7, 1, 2).standard_normal(5)
        b = derive_rng(7, 1, 2).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_keys_separate_streams(self):
        a = derive_rng(7, 1, 2).standard_normal(5)
        b = derive_rng(7, 2, 1).standard_normal(5)
        assert not np.allclose(a, b)


class TestChannelSampling:
    def test_cscg_moments(self, rng):
        x = sample_cscg_vector(4, 2.0, rng, size=50_000)
        assert x.shape == (50_000, 4)
        assert np.mean(np.abs(x) ** 2) == pytest.approx(2.0, rel=0.02)
        # circular symmetry: E[x^2] = 0 and equal real/imag power
        assert abs(np.mean(x**2)) < 0.05
        assert np.var(x.real) == pytest.approx(np.var(x.imag), rel=0.03)

    def test_zero_dim_rejected(self, rng):
        with pytest.raises(ValueError):
            sample_cscg_vector(0, 1.0, rng)

    def test_instance_consistency(self):
        c = SystemConfig.uniform(5, 3, est_error_var=0.3, channel_var=np.linspace(0.5, 1.5, 5))
        inst = generate_channel_instance(c, derive_rng(3))
        assert inst.est_channel.shape == (5, 3)
        np.testing.assert_allclose(inst.true_channel, inst.est_channel - inst.error)

    def test_error_free_estimate_is_exact(self):
        c = SystemConfig.uniform(3, 2, est_error_var=0.0)
        inst = generate_channel_instance(c, derive_rng(4))
        np.testing.assert_array_equal(inst.true_channel, inst.est_channel)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_reproducible(self, seed):
        c = SystemConfig.uniform(2, 2, est_error_var=0.1)
        a = generate_channel_instance(c, derive_rng(seed))
        b = generate_channel_instance(c, derive_rng(seed))
        np.testing.assert_array_equal(a.est_channel, b.est_channel)


class TestScenario:
    def test_minimal_document(self):
        sc = parse_scenario(BASE)
        assert sc.config.num_wds == 3
        assert np.all((sc.config.channel_var >= 0.5) & (sc.config.channel_var <= 1.5))
        assert sc.est_channels is None

    def test_channel_var_draw_depends_on_seed(self):
        a = parse_scenario({**BASE, "master_seed": 1}).config.channel_var
        b = parse_scenario({**BASE, "master_seed": 1}).config.channel_var
        c = parse_scenario({**BASE, "master_seed": 2}).config.channel_var
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_overrides_are_json(self):
        sc = parse_scenario(BASE, {"power_budget": "[1, 2, 3]", "noise_var": "0.25"})
        np.testing.assert_array_equal(sc.config.power_budget, [1, 2, 3])
        assert sc.config.noise_var == 0.25

    def test_est_channels_forms(self):
        sc = parse_scenario({**BASE, "num_rx_antennas": 1,
                             "est_channels": [1.0, [[0.0, 2.0]], "1-1j"]})
        np.testing.assert_array_equal(sc.est_channels[:, 0], [1.0, 2j, 1 - 1j])

    @pytest.mark.parametrize("doc,field", [
        ({**BASE, "bogus": 1}, "bogus"),
        ({k: v for k, v in BASE.items() if k != "noise_var"}, "noise_var"),
        ({**BASE, "num_wds": 2.5}, "num_wds"),
        ({**BASE, "power_budget": [1.0, 1.0]}, "power_budget"),
        ({**BASE, "est_channels": [[1, 1]]}, "est_channels"),
        ({**BASE, "noise_var": -1}, "noise_var"),
    ])
    def test_errors_name_field(self, doc, field):
        with pytest.raises(ConfigError) as info:
            parse_scenario(doc)
        assert info.value.field == field

    def test_load_file(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(BASE))
        assert load_scenario(p).config.num_rx_antennas == 2

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_scenario(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_scenario(bad)
