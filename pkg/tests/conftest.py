import pytest

from src.algebra.gf import field_make
from src.config import load_config, reset_config


@pytest.fixture
def gf2():
    return field_make(2)


@pytest.fixture
def gf3():
    return field_make(3)


@pytest.fixture
def gf4():
    return field_make(2, 2)


@pytest.fixture
def gf8():
    return field_make(2, 3)


@pytest.fixture(autouse=True)
def fresh_config(tmp_path, monkeypatch):
    """Every test gets its own config: single thread, no log file, reports under tmp_path."""
    monkeypatch.setenv("MRDLAB_OUTPUT_DIR", str(tmp_path / "reports"))
    monkeypatch.setenv("MRDLAB_LOG_FILE", "")
    monkeypatch.setenv("MRDLAB_THREADS", "1")
    monkeypatch.setenv("MRDLAB_AUDIT_LOGS_ENABLED", "false")
    reset_config()
    yield load_config()
    reset_config()
