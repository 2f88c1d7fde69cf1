"""Unit tests for the Config class."""

import os
from fractions import Fraction

import pytest

from orbitile.config import Config, OrbitParams, PrecisionParams, RenderParams, apply_config, config, load_config


class TestConfig:
    """Test cases for the Config class."""

    def test_config_init_with_defaults(self):
        """Test Config initialization with default values."""
        cfg = Config()
        assert cfg.start_bits == 64
        assert cfg.exact_fallback_bits == 128
        assert cfg.scale_slack == '3/2'
        assert cfg.bound == 20
        assert cfg.resolve_ties_leftward is False
        assert cfg.reject_row_ties is False
        assert cfg.default_c == '1/10'
        assert cfg.default_d == '1/20'
        assert cfg.seed == 0
        assert cfg.family_windows == 3

    def test_bit_budget_from_env(self):
        """Test the default bit budget follows ORBITILE_BITS."""
        expected = int(os.getenv('ORBITILE_BITS', '4096'))
        assert Config.__dataclass_fields__['bit_budget'].default == expected

    def test_finalize_clamps_precision(self):
        """Test finalize_config keeps start_bits ≤ fallback ≤ budget."""
        cfg = Config(bit_budget=32, start_bits=8, exact_fallback_bits=1000)
        cfg.finalize_config()
        assert cfg.start_bits == 16
        assert cfg.bit_budget == 32
        assert cfg.exact_fallback_bits == 32

    def test_finalize_rejects_small_slack(self):
        """Test a scaling slack of at most one is reset."""
        cfg = Config(scale_slack='1')
        cfg.finalize_config()
        assert cfg.scale_slack == '3/2'

    def test_finalize_rejects_bad_overlap(self):
        """Test a period overlap outside (0, 1] is reset."""
        cfg = Config(period_min_overlap=1.5)
        cfg.finalize_config()
        assert cfg.period_min_overlap == 0.5

    def test_update_with_sections(self):
        """Test sectioned TOML mappings are flattened onto the fields."""
        cfg = Config()
        cfg.update({'orbit': {'default_rows': 12, 'seed': 7}, 'render': {'scale': 50.0}})
        assert cfg.default_rows == 12
        assert cfg.seed == 7
        assert cfg.scale == 50.0

    def test_update_ignores_unknown_keys(self):
        """Test unknown keys leave the config unchanged."""
        cfg = Config()
        cfg.update({'model': 'anything'})
        assert not hasattr(cfg, 'model')

    def test_str_lists_sections(self):
        """Test the printed config names its sections."""
        text = str(Config())
        assert '### precision Attributes ###' in text
        assert 'bit_budget' in text
        assert 'overlay_stroke' in text


class TestParams:
    """Test cases for parameter groups."""

    def test_precision_params(self):
        """Test precision parameters and overrides."""
        params = Config().get_precision_params({'bit_budget': 256})
        assert isinstance(params, PrecisionParams)
        assert params.bit_budget == 256
        assert params.start_bits == 64

    def test_orbit_params_are_exact(self):
        """Test offsets and slack come out as fractions."""
        params = Config().get_orbit_params()
        assert isinstance(params, OrbitParams)
        assert params.default_c == Fraction(1, 10)
        assert params.default_d == Fraction(1, 20)
        assert params.scale_slack == Fraction(3, 2)

    def test_render_params_copy_colors(self):
        """Test render parameters hold their own list of colours."""
        cfg = Config()
        params = cfg.get_render_params()
        assert isinstance(params, RenderParams)
        params.fill_colors.append('#000000')
        assert '#000000' not in cfg.fill_colors


class TestConfigFiles:
    """Test cases for loading user files."""

    def test_load_config(self, tmp_path):
        """Test a user file overrides the defaults in a fresh Config."""
        path = tmp_path / 'user.toml'
        path.write_text('[orbit]\ndefault_width = 64\n')
        cfg = load_config(path)
        assert cfg.default_width == 64
        assert cfg is not config

    def test_apply_config(self, tmp_path, monkeypatch):
        """Test a user file is merged into the shared config."""
        monkeypatch.setattr(config, 'equation_samples', config.equation_samples)
        path = tmp_path / 'user.toml'
        path.write_text('[orbit]\nequation_samples = 7\n')
        assert apply_config(path) is config
        assert config.equation_samples == 7

    def test_apply_config_missing_file(self, tmp_path):
        """Test a missing user file raises."""
        with pytest.raises(FileNotFoundError):
            apply_config(tmp_path / 'missing.toml')
