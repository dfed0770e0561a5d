"""
CRUD операции для базы данных
"""

from datetime import datetime
from typing import List, Optional

from sqlalchemy import desc, select

from src.database.models import RunRecord, async_session


# ===================== RUN OPERATIONS =====================

async def save_run(
    name: str,
    command: str,
    path: str,
    n_spins: Optional[int] = None,
    best_c: Optional[float] = None,
    verdict: Optional[str] = None,
    seed: Optional[int] = None,
    status: str = "ok",
    note: Optional[str] = None,
    created_at: Optional[datetime] = None,
    url: Optional[str] = None,
) -> RunRecord:
    """Сохранить запуск; повторное имя обновляет существующую запись"""
    async with async_session(url) as session:
        result = await session.execute(select(RunRecord).where(RunRecord.name == name))
        record = result.scalar_one_or_none()

        if record is None:
            record = RunRecord(name=name)
            session.add(record)

        record.command = command
        record.path = path
        record.n_spins = n_spins
        record.best_c = best_c
        record.verdict = verdict
        record.seed = seed
        record.status = status
        record.note = note
        record.created_at = created_at or datetime.utcnow()
        await session.commit()
        await session.refresh(record)
        return record


async def get_recent_runs(limit: int = 20, url: Optional[str] = None) -> List[RunRecord]:
    """Последние запуски, новые первыми"""
    async with async_session(url) as session:
        result = await session.execute(
            select(RunRecord).order_by(desc(RunRecord.created_at)).limit(limit)
        )
        return result.scalars().all()


async def get_run_by_name(name: str, url: Optional[str] = None) -> Optional[RunRecord]:
    async with async_session(url) as session:
        result = await session.execute(select(RunRecord).where(RunRecord.name == name))
        return result.scalar_one_or_none()


async def get_runs_since(since: datetime, limit: int = 100, url: Optional[str] = None) -> List[RunRecord]:
    """Запуски не раньше since"""
    async with async_session(url) as session:
        result = await session.execute(
            select(RunRecord)
            .where(RunRecord.created_at >= since)
            .order_by(desc(RunRecord.created_at))
            .limit(limit)
        )
        return result.scalars().all()
