"""
Общие фикстуры: генератор с фиксированным зерном, временный архив и база запусков
"""

from pathlib import Path

import numpy as np
import pytest

from config.settings import BASE_DIR, settings

DATA_DIR = BASE_DIR / "data"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture(autouse=True)
def db_url(tmp_path, monkeypatch) -> str:
    """Каждый тест пишет индекс запусков во временную базу"""
    url = f"sqlite+aiosqlite:///{tmp_path / 'index' / 'runs.db'}"
    monkeypatch.setenv("DATABASE_URL", url)
    monkeypatch.setattr(settings, "DATABASE_URL", url)
    return url


@pytest.fixture
def archive_root(tmp_path, monkeypatch) -> Path:
    root = tmp_path / "runs"
    monkeypatch.setenv("SPINTHERMO_OUT", str(root))
    return root


@pytest.fixture
def models_dir() -> Path:
    return DATA_DIR / "models"


@pytest.fixture
def experiments_dir() -> Path:
    return DATA_DIR / "experiments"
