"""Tests for the simulation configuration."""

import pytest

from config.simulation_config import SimConfig
from src.core.exceptions import ConfigurationError
from src.services.channel import Fading


class TestDefaults:
    def test_reference_values(self):
        config = SimConfig.build()
        assert config.n == 256
        assert config.cp_length == 32
        assert config.epsilon == 0.15
        assert config.snr_grid_db == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
        assert config.d_grid == [2, 8, 16, 64, 128]
        assert config.trials == "auto"

    def test_prefix_follows_n(self):
        assert SimConfig.build(n=64, d_grid=[8]).cp_length == 8


class TestValidation:
    def test_d_must_divide_n(self):
        with pytest.raises(ConfigurationError) as exc:
            SimConfig.build(n=64)
        assert exc.value.config_key == "d_grid"
        assert "128" in exc.value.message

    def test_itu_prefix_too_short(self):
        """The ITU profile spans 15 samples at n=256."""
        with pytest.raises(ConfigurationError) as exc:
            SimConfig.build(channel="itu", n_cp=10)
        assert exc.value.config_key == "n_cp"
        assert SimConfig.build(channel="itu", n_cp=15).cp_length == 15

    def test_tdl_needs_one_sample(self):
        with pytest.raises(ConfigurationError) as exc:
            SimConfig.build(n_cp=0)
        assert exc.value.config_key == "n_cp"
        assert SimConfig.build(n_cp=1).cp_length == 1

    def test_prefix_longer_than_symbol(self):
        with pytest.raises(ConfigurationError) as exc:
            SimConfig.build(n=64, d_grid=[8], n_cp=65)
        assert exc.value.config_key == "n_cp"

    @pytest.mark.parametrize("epsilon", [0.0, 1.0, -0.1])
    def test_epsilon_open_interval(self, epsilon):
        with pytest.raises(ConfigurationError) as exc:
            SimConfig.build(epsilon=epsilon)
        assert exc.value.config_key == "epsilon"


class TestFadingLaw:
    def test_channel_defaults(self):
        assert SimConfig.build().fading_law is Fading.PER_TAP
        assert SimConfig.build(channel="itu").fading_law is Fading.PROFILE

    def test_explicit_choice(self):
        assert SimConfig.build(channel="itu", fading="per_tap").fading_law is Fading.PER_TAP

    def test_fixed_taps_override(self):
        config = SimConfig.build(channel="itu", fading="per_tap", deterministic_taps=True)
        assert config.fading_law is Fading.FIXED

    def test_signature_records_resolved_law(self):
        """An explicit default and an unset field describe the same run."""
        implicit = SimConfig.build(channel="itu")
        explicit = SimConfig.build(channel="itu", fading="profile")
        assert implicit.canonical_dict()["fading"] == "profile"
        assert implicit.signature() == explicit.signature()
        assert implicit.signature() != SimConfig.build(channel="itu", fading="per_tap").signature()
