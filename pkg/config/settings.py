"""
Конфигурация приложения
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

# Загрузка переменных окружения из .env файла
load_dotenv()

# Базовая директория проекта
BASE_DIR = Path(__file__).resolve().parent.parent

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _env(name: str, default: str) -> str:
    return os.getenv(name, default)


@dataclass
class Settings:
    """Настройки приложения; поля читают окружение при создании экземпляра"""

    # Архив результатов
    OUTPUT_DIR: Path = field(default_factory=lambda: Path(_env("SPINTHERMO_OUT", str(BASE_DIR / "runs"))))

    # Database
    DATABASE_URL: str = field(
        default_factory=lambda: _env("DATABASE_URL", f"sqlite+aiosqlite:///{BASE_DIR}/data/runs.db")
    )

    # Потоки numba и зерно по умолчанию
    THREADS: int = field(default_factory=lambda: int(_env("SPINTHERMO_THREADS", str(os.cpu_count() or 1))))
    SEED: int = field(default_factory=lambda: int(_env("SPINTHERMO_SEED", "0")))

    # Logging
    LOG_LEVEL: str = field(default_factory=lambda: _env("LOG_LEVEL", "INFO").upper())
    LOG_FILE: Path = field(default_factory=lambda: Path(_env("LOG_FILE", str(BASE_DIR / "data" / "spinthermo.log"))))

    # Debug mode
    DEBUG: bool = field(default_factory=lambda: _env("DEBUG", "False").lower() == "true")

    # Готовые модели и конфигурации экспериментов
    MODELS_DIR: Path = BASE_DIR / "data" / "models"
    EXPERIMENTS_DIR: Path = BASE_DIR / "data" / "experiments"

    def __post_init__(self):
        if self.THREADS < 1:
            raise ValueError("SPINTHERMO_THREADS должно быть >= 1")
        if self.LOG_LEVEL not in LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL должен быть одним из {', '.join(LOG_LEVELS)}")
        if self.DEBUG:
            self.LOG_LEVEL = "DEBUG"

    @property
    def log_level(self) -> int:
        return getattr(logging, self.LOG_LEVEL)


# Создаем экземпляр настроек
settings = Settings()
