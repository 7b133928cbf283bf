from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config import Config, get_config, load_config, reset_config


class TestConfig:
    def test_defaults(self, monkeypatch):
        for name in ("MRDLAB_THREADS", "MRDLAB_LOG_FILE", "MRDLAB_OUTPUT_DIR", "MRDLAB_AUDIT_LOGS_ENABLED"):
            monkeypatch.delenv(name, raising=False)
        config = Config(_env_file=None)
        assert config.enumeration_cap == 2**24
        assert config.seed == 0
        assert config.log_level == "INFO"
        assert config.log_file == "mrdlab.log"
        assert config.output_dir == Path("reports")
        assert config.threads >= 1

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("MRDLAB_ENUMERATION_CAP", "1000")
        monkeypatch.setenv("MRDLAB_LOG_LEVEL", "DEBUG")
        reset_config()
        config = get_config()
        assert config.enumeration_cap == 1000
        assert config.log_level == "DEBUG"
        assert config.threads == 1

    def test_overrides_replace_cached_instance(self):
        config = load_config(enumeration_cap=64, seed=None)
        assert config.enumeration_cap == 64
        assert config.seed == 0
        assert get_config() is config

    def test_rejects_invalid_values(self):
        with pytest.raises(ValidationError):
            load_config(threads=0)
        with pytest.raises(ValidationError):
            load_config(log_level="LOUD")

    def test_ensure_output_dir(self, fresh_config):
        path = fresh_config.ensure_output_dir()
        assert path.is_dir()
