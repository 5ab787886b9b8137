"""
Tests for the layered YAML configuration.
"""
import pytest

from veilvote.config.config_loader import ConfigLoader, get_config


@pytest.fixture
def config_dir(tmp_path):
    """A config directory with base, test and local overlays."""
    (tmp_path / "base.yaml").write_text(
        "threads: 1\n"
        "accounting:\n"
        "  default_delta: 1.0e-3\n"
        "  alpha_max_exponent: 14\n"
        "harness:\n"
        "  vote_mode: hard\n"
        "logging:\n"
        "  level: INFO\n",
        encoding="utf-8",
    )
    (tmp_path / "test.yaml").write_text("logging:\n  level: WARNING\n", encoding="utf-8")
    (tmp_path / "test.local.yaml").write_text("accounting:\n  alpha_max_exponent: 10\n", encoding="utf-8")
    return tmp_path


@pytest.fixture
def clean_env(monkeypatch):
    """Drop VEILVOTE_* overrides that could leak in from the shell."""
    import os
    for name in list(os.environ):
        if name.startswith("VEILVOTE_") and name != "VEILVOTE_ENV":
            monkeypatch.delenv(name)
    return monkeypatch


class TestConfigLoader:
    """Test cases for ConfigLoader."""

    def test_overlays_in_order(self, config_dir, clean_env):
        config = ConfigLoader(env="test", config_dir=config_dir).load()
        assert config["logging"]["level"] == "WARNING"
        assert config["accounting"]["alpha_max_exponent"] == 10
        assert config["accounting"]["default_delta"] == pytest.approx(1e-3)

    def test_unknown_environment_uses_base(self, config_dir, clean_env):
        config = ConfigLoader(env="staging", config_dir=config_dir).load()
        assert config["logging"]["level"] == "INFO"
        assert config["accounting"]["alpha_max_exponent"] == 14

    def test_environment_variables_override(self, config_dir, clean_env):
        clean_env.setenv("VEILVOTE_THREADS", "4")
        clean_env.setenv("VEILVOTE_ACCOUNTING_DEFAULT_DELTA", "0.01")
        clean_env.setenv("VEILVOTE_LOGGING_LEVEL", "DEBUG")
        config = ConfigLoader(env="test", config_dir=config_dir).load()
        assert config["threads"] == 4
        assert config["accounting"]["default_delta"] == pytest.approx(0.01)
        assert config["logging"]["level"] == "DEBUG"

    def test_underscored_keys_resolve(self, config_dir, clean_env):
        clean_env.setenv("VEILVOTE_HARNESS_VOTE_MODE", "soft")
        config = ConfigLoader(env="test", config_dir=config_dir).load()
        assert config["harness"]["vote_mode"] == "soft"

    def test_unknown_variable_creates_flat_key(self, config_dir, clean_env):
        clean_env.setenv("VEILVOTE_BRAND_NEW", "true")
        config = ConfigLoader(env="test", config_dir=config_dir).load()
        assert config["brand_new"] is True

    def test_env_name_from_environment(self, config_dir, clean_env):
        clean_env.setenv("VEILVOTE_ENV", "test")
        assert ConfigLoader(config_dir=config_dir).env == "test"

    def test_packaged_defaults(self):
        config = get_config()
        assert config["accounting"]["alpha_max_exponent"] == 14
        assert config["accounting"]["data_dependent_bound"] == "closed_form"
        assert config["harness"]["k_fraction"] == pytest.approx(0.05)
