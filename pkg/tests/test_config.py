import pytest

from src.core.config import DEFAULT_ORACLE_PRIMES, Settings, load_settings

VARIABLES = ["ZETA_DEPTH_BOUND", "ZETA_ORACLE_MODE", "ZETA_JOBS", "ZETA_CACHE_DIR", "ZETA_LOG_LEVEL",
             "ZETA_ORACLE_PRIMES"]


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    # set-then-delete so that values loaded from a .env file are removed afterwards
    for name in VARIABLES:
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    empty = tmp_path / "empty.env"
    empty.write_text("", encoding="utf-8")
    return str(empty)


def test_defaults(clean_env):
    settings = load_settings(clean_env)
    assert settings == Settings()
    assert settings.oracle_primes == DEFAULT_ORACLE_PRIMES


def test_environment_overrides(clean_env, monkeypatch):
    monkeypatch.setenv("ZETA_DEPTH_BOUND", "5")
    monkeypatch.setenv("ZETA_ORACLE_MODE", "only")
    monkeypatch.setenv("ZETA_JOBS", "4")
    monkeypatch.setenv("ZETA_LOG_LEVEL", "debug")
    monkeypatch.setenv("ZETA_ORACLE_PRIMES", "11, 13,17")
    settings = load_settings(clean_env)
    assert settings.depth_bound == 5
    assert settings.oracle_mode == "only"
    assert settings.jobs == 4
    assert settings.log_level == "DEBUG"
    assert settings.oracle_primes == (11, 13, 17)


def test_dotenv_file(clean_env, tmp_path):
    path = tmp_path / "test.env"
    path.write_text("ZETA_JOBS=3\nZETA_CACHE_DIR=/tmp/zeta\n", encoding="utf-8")
    settings = load_settings(str(path))
    assert settings.jobs == 3
    assert settings.cache_dir == "/tmp/zeta"


@pytest.mark.parametrize("name, value", [
    ("ZETA_DEPTH_BOUND", "-1"),
    ("ZETA_ORACLE_MODE", "sometimes"),
    ("ZETA_JOBS", "0"),
    ("ZETA_JOBS", "many"),
])
def test_invalid_values(clean_env, monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        load_settings(clean_env)
