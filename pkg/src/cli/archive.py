"""
Архив результатов: runs/<timestamp>-<name>/{config.json, result.json, curves/*.csv, log.txt}
"""

import asyncio
import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from src.analysis import ScalingCurve, write_curve_csv, write_json, write_rows_csv
from src.database import dispose_engines, init_db, save_run
from src.exceptions import SpinThermoError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ResultArchive:
    """Каталог одного запуска; записанные файлы не перезаписываются"""

    def __init__(self, root: Path, name: str, command: str, now: Optional[datetime] = None):
        self.created_at = now or datetime.now()
        self.command = command
        base = f"{self.created_at.strftime('%Y%m%dT%H%M%S')}-{name}"
        self.root = Path(root)
        self.name = base
        suffix = 1
        while (self.root / self.name).exists():
            self.name = f"{base}-{suffix}"
            suffix += 1
        self.path = self.root / self.name
        self.curves_dir = self.path / "curves"
        self.curves_dir.mkdir(parents=True)
        self._handler: Optional[logging.Handler] = None

    def __enter__(self) -> "ResultArchive":
        self._handler = logging.FileHandler(self.path / "log.txt", encoding="utf-8")
        self._handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.getLogger().addHandler(self._handler)
        logger.info(f"Архив {self.path}")
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None:
            logger.error(f"Команда {self.command} завершилась с ошибкой: {exc}")
        if self._handler is not None:
            logging.getLogger().removeHandler(self._handler)
            self._handler.close()
            self._handler = None
        return False

    def _target(self, relative: str) -> Path:
        path = self.path / relative
        if path.exists():
            raise SpinThermoError(f"{path} уже записан; результаты архива неизменяемы")
        return path

    def write_config(self, payload: dict) -> Path:
        return write_json(self._target("config.json"), payload)

    def write_result(self, payload: dict, meta: Optional[dict] = None) -> Path:
        """result.json без времени и версий; они уходят в result.json.provenance.json"""
        path = write_json(self._target("result.json"), payload)
        if meta is not None:
            write_json(self._target("result.json.provenance.json"), meta)
        return path

    def write_json(self, relative: str, payload: dict) -> Path:
        return write_json(self._target(relative), payload)

    def write_curve(self, curve: ScalingCurve, meta: Optional[dict] = None, name: Optional[str] = None) -> Path:
        return write_curve_csv(curve, self._target(f"curves/{name or curve.name}.csv"), meta)

    def write_table(self, name: str, header: List[str], rows: List[list], meta: Optional[dict] = None) -> Path:
        return write_rows_csv(self._target(f"curves/{name}.csv"), header, rows, meta)

    def index(
        self,
        n_spins: Optional[int] = None,
        best_c: Optional[float] = None,
        verdict: Optional[str] = None,
        seed: Optional[int] = None,
        status: str = "ok",
        url: Optional[str] = None,
    ) -> bool:
        """Запись в индекс запусков; ошибка индексации не прерывает команду"""

        async def _save():
            try:
                await init_db(url)
                await save_run(
                    name=self.name,
                    command=self.command,
                    path=str(self.path),
                    n_spins=n_spins,
                    best_c=best_c,
                    verdict=verdict,
                    seed=seed,
                    status=status,
                    created_at=self.created_at,
                    url=url,
                )
            finally:
                await dispose_engines()

        try:
            asyncio.run(_save())
            return True
        except Exception as e:
            logger.error(f"Ошибка индексации запуска {self.name}: {e}")
            return False
