import os
import logging
from dataclasses import dataclass

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CACHE_DIR = "data/cache"
DEFAULT_ORACLE_PRIMES = (101, 103, 107, 109, 113)
ORACLE_MODES = ("off", "crosscheck", "only")


@dataclass(frozen=True)
class Settings:
    """
    Настройки окружения. Значения берутся из переменных окружения
    (и файла .env, если он есть), иначе используются значения по умолчанию.
    """
    depth_bound: int = 16
    oracle_mode: str = "off"
    jobs: int = 1
    cache_dir: str = DEFAULT_CACHE_DIR
    log_level: str = "INFO"
    oracle_primes: tuple = DEFAULT_ORACLE_PRIMES

    def __post_init__(self):
        if self.depth_bound < 0:
            raise ValueError(f"Граница глубины редукции должна быть неотрицательной: {self.depth_bound}")
        if self.oracle_mode not in ORACLE_MODES:
            raise ValueError(f"Неизвестный режим оракула: {self.oracle_mode}")
        if self.jobs < 1:
            raise ValueError(f"Число процессов должно быть положительным: {self.jobs}")


def _parse_primes(raw: str) -> tuple:
    return tuple(int(part) for part in raw.split(",") if part.strip())


def load_settings(dotenv_path: str = None) -> Settings:
    """
    Загружает настройки из окружения.

    Args:
        dotenv_path: Путь к .env файлу. None означает поиск .env от текущей директории.

    Returns:
        Settings.
    """
    load_dotenv(dotenv_path)
    settings = Settings(
        depth_bound=int(os.getenv("ZETA_DEPTH_BOUND", "16")),
        oracle_mode=os.getenv("ZETA_ORACLE_MODE", "off"),
        jobs=int(os.getenv("ZETA_JOBS", "1")),
        cache_dir=os.getenv("ZETA_CACHE_DIR", DEFAULT_CACHE_DIR),
        log_level=os.getenv("ZETA_LOG_LEVEL", "INFO").upper(),
        oracle_primes=_parse_primes(os.getenv("ZETA_ORACLE_PRIMES", ",".join(map(str, DEFAULT_ORACLE_PRIMES)))),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings
