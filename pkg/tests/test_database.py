import asyncio
from datetime import datetime

from src.database import dispose_engines, get_recent_runs, get_run_by_name, get_runs_since, init_db, save_run


def run(coro_factory):
    async def _wrapped():
        try:
            await init_db()
            return await coro_factory()
        finally:
            await dispose_engines()

    return asyncio.run(_wrapped())


def test_save_run_upserts_by_name():
    async def scenario():
        await save_run("r1", "optimize", "/tmp/r1", n_spins=4, best_c=1.0)
        await save_run("r1", "optimize", "/tmp/r1", n_spins=4, best_c=2.0, verdict="all-to-all")
        return await get_run_by_name("r1"), await get_recent_runs()

    record, recent = run(scenario)
    assert record.best_c == 2.0
    assert record.verdict == "all-to-all"
    assert len(recent) == 1


def test_recent_runs_newest_first_and_since_filter():
    async def scenario():
        await save_run("old", "reproduce", "/tmp/old", created_at=datetime(2024, 1, 1))
        await save_run("new", "chimera", "/tmp/new", created_at=datetime(2024, 6, 1))
        return await get_recent_runs(), await get_runs_since(datetime(2024, 3, 1))

    recent, since = run(scenario)
    assert [r.name for r in recent] == ["new", "old"]
    assert [r.name for r in since] == ["new"]


def test_explicit_url(tmp_path):
    url = f"sqlite+aiosqlite:///{tmp_path / 'nested' / 'other.db'}"

    async def scenario():
        try:
            await init_db(url)
            await save_run("x", "evaluate", "/tmp/x", url=url)
            return await get_recent_runs(url=url)
        finally:
            await dispose_engines()

    assert [r.name for r in asyncio.run(scenario())] == ["x"]
    assert (tmp_path / "nested" / "other.db").exists()
