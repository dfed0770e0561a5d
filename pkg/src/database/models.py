"""
Модели базы данных SQLite: индекс архивных запусков
"""

from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

from sqlalchemy import Column, DateTime, Float, Integer, String, Text
from sqlalchemy.engine import make_url
from sqlalchemy.ext.asyncio import AsyncEngine, AsyncSession, async_sessionmaker, create_async_engine
from sqlalchemy.orm import DeclarativeBase

from config.settings import settings


class Base(DeclarativeBase):
    """Базовый класс для всех моделей"""
    pass


class RunRecord(Base):
    """Запись об одном запуске CLI, сохранённом в архив"""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    name = Column(String(300), nullable=False, unique=True, index=True)  # <timestamp>-<name>
    command = Column(String(50), nullable=False, index=True)  # evaluate, optimize, reproduce, chimera
    path = Column(String(1000), nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow, index=True)
    n_spins = Column(Integer, nullable=True)
    best_c = Column(Float, nullable=True)
    verdict = Column(String(100), nullable=True)
    seed = Column(Integer, nullable=True)
    status = Column(String(50), default="ok")
    note = Column(Text, nullable=True)

    def __repr__(self) -> str:
        return f"<RunRecord {self.name} {self.command} C={self.best_c}>"


# Движки создаются лениво: URL берётся из настроек в момент первого обращения
_engines: Dict[str, AsyncEngine] = {}
_sessions: Dict[str, async_sessionmaker] = {}


def get_engine(url: Optional[str] = None) -> AsyncEngine:
    url = url or settings.DATABASE_URL
    if url not in _engines:
        _engines[url] = create_async_engine(url, echo=settings.DEBUG)
    return _engines[url]


def async_session(url: Optional[str] = None) -> AsyncSession:
    """Новая сессия базы данных"""
    url = url or settings.DATABASE_URL
    if url not in _sessions:
        _sessions[url] = async_sessionmaker(get_engine(url), class_=AsyncSession, expire_on_commit=False)
    return _sessions[url]()


async def init_db(url: Optional[str] = None):
    """Инициализация базы данных; каталог файла SQLite создаётся при необходимости"""
    parsed = make_url(url or settings.DATABASE_URL)
    if parsed.get_backend_name() == "sqlite" and parsed.database and parsed.database != ":memory:":
        Path(parsed.database).parent.mkdir(parents=True, exist_ok=True)
    async with get_engine(url).begin() as conn:
        await conn.run_sync(Base.metadata.create_all)


async def dispose_engines():
    for engine in _engines.values():
        await engine.dispose()
    _engines.clear()
    _sessions.clear()
