"""
Выгрузка кривых в CSV (по файлу на кривую) и файлы происхождения рядом с ними
"""

import csv
import json
import logging
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Tuple

import numba
import numpy as np
import scipy

from src.analysis.scaling import ScalingCurve

logger = logging.getLogger(__name__)


def _cell(value) -> str:
    # repr сохраняет все значащие цифры float
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False, default=str)
    return path


def provenance(seed: Optional[int] = None, **extra) -> dict:
    """Время, версии библиотек и параметры запуска"""
    payload = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "numba_version": numba.__version__,
        "seed": seed,
    }
    payload.update(extra)
    return payload


def write_curve_csv(curve: ScalingCurve, path: Path, meta: Optional[dict] = None) -> Path:
    """CSV с заголовком (n, value, param:...) и <csv>.provenance.json рядом"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(curve.columns())
        for row in curve.rows():
            writer.writerow([_cell(v) for v in row])

    sidecar = dict(meta or {})
    sidecar.setdefault("curve", curve.name)
    if curve.power_law is not None:
        sidecar["fit"] = curve.power_law.to_dict()
    write_json(path.with_name(path.name + ".provenance.json"), sidecar)
    logger.debug(f"Кривая {curve.name}: {len(curve.points)} точек -> {path}")
    return path


def read_curve_csv(path: Path, name: Optional[str] = None) -> ScalingCurve:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        rows: List[List[str]] = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    if header[:2] != ["n", "value"]:
        raise ValueError(f"{path}: ожидался заголовок n,value,..., получено {header}")
    keys = [column.split(":", 1)[1] for column in header[2:]]
    curve = ScalingCurve(name or path.stem)
    for row in body:
        extra = {k: float(v) for k, v in zip(keys, row[2:]) if v != ""}
        curve.add(int(row[0]), float(row[1]), **extra)
    return curve


def write_rows_csv(path: Path, header: List[str], rows: List[list], meta: Optional[dict] = None) -> Path:
    """Произвольная таблица (например, строки воспроизводимой таблицы); meta - в файл происхождения"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    if meta is not None:
        write_json(path.with_name(path.name + ".provenance.json"), meta)
    return path


def curve_paths(directory: Path) -> List[Tuple[str, Path]]:
    return [(p.stem, p) for p in sorted(Path(directory).glob("*.csv"))]
