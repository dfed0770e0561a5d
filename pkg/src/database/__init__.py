"""Database Package"""
from src.database.models import RunRecord, async_session, dispose_engines, init_db
from src.database.crud import get_recent_runs, get_run_by_name, get_runs_since, save_run

__all__ = [
    'RunRecord',
    'async_session',
    'dispose_engines',
    'init_db',
    'save_run',
    'get_recent_runs',
    'get_run_by_name',
    'get_runs_since',
]
