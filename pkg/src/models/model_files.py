"""
Файлы моделей (JSON) и единая диспетчеризация по типу модели
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

from src.exceptions import DomainError, SpinThermoValidationError
from src.models.chimera import chimera_topology
from src.models.hamiltonian import SpinHamiltonian, complete_topology, ring_topology
from src.models.ising import (
    AllToAllParams,
    IsingParams,
    all_to_all_spectrum,
    build_all_to_all,
    build_ising_1d,
    ising_1d_spectrum,
    ising_1d_stats,
)
from src.models.star import StarParams, build_star, star_spectrum, star_stats
from src.models.star_chain import StarChainParams, build_star_chain, star_chain_spectrum, star_chain_stats
from src.thermo import Spectrum, ThermalStats, thermal_stats

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ModelParams = Union[StarParams, StarChainParams, IsingParams, AllToAllParams, SpinHamiltonian]

_REQUIRED = {
    "star": {"n_spins", "a", "b"},
    "star_chain": {"n_units", "leaves_per_unit", "a", "b", "j"},
    "ising_1d": {"n_spins", "h", "j"},
    "all_to_all": {"n_spins", "h", "j"},
    "generic": {"n_spins", "h"},
}
_OPTIONAL = {
    "star_chain": {"open_chain"},
    "generic": {"J", "topology"},
}


def parse_topology(spec, n_spins: int):
    if spec is None or spec == "complete":
        return complete_topology(n_spins)
    if spec == "ring":
        return ring_topology(n_spins)
    if isinstance(spec, str) and spec.startswith("chimera:"):
        return chimera_topology(int(spec.split(":", 1)[1]))
    if isinstance(spec, list):
        return frozenset(tuple(sorted((int(i), int(j)))) for i, j in spec)
    raise SpinThermoValidationError("topology", f"неизвестная топология {spec!r}")


def model_from_dict(payload: dict) -> ModelParams:
    """Разбор описания модели с проверкой набора ключей"""
    if not isinstance(payload, dict):
        raise SpinThermoValidationError("model", "ожидался объект JSON")
    kind = payload.get("model")
    if kind not in _REQUIRED:
        raise SpinThermoValidationError("model", f"неизвестный тип модели {kind!r}")
    version = payload.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SpinThermoValidationError("schema_version", f"поддерживается только версия {SCHEMA_VERSION}")

    keys = set(payload) - {"model", "schema_version"}
    missing = _REQUIRED[kind] - keys
    unknown = keys - _REQUIRED[kind] - _OPTIONAL.get(kind, set())
    if missing:
        raise SpinThermoValidationError(kind, f"отсутствуют поля: {', '.join(sorted(missing))}")
    if unknown:
        raise SpinThermoValidationError(kind, f"неизвестные поля: {', '.join(sorted(unknown))}")

    try:
        if kind == "star":
            return StarParams(int(payload["n_spins"]), float(payload["a"]), float(payload["b"]))
        if kind == "star_chain":
            return StarChainParams(
                int(payload["n_units"]), int(payload["leaves_per_unit"]),
                float(payload["a"]), float(payload["b"]), float(payload["j"]),
                bool(payload.get("open_chain", False)),
            )
        if kind == "ising_1d":
            return IsingParams(int(payload["n_spins"]), float(payload["h"]), float(payload["j"]))
        if kind == "all_to_all":
            return AllToAllParams(int(payload["n_spins"]), float(payload["h"]), float(payload["j"]))
        n = int(payload["n_spins"])
        couplings = {(int(i), int(j)): float(v) for i, j, v in payload.get("J", [])}
        return SpinHamiltonian.build(n, payload["h"], couplings, parse_topology(payload.get("topology"), n))
    except SpinThermoValidationError:
        raise
    except DomainError as e:
        raise SpinThermoValidationError(kind, str(e))
    except (TypeError, KeyError, ValueError) as e:
        raise SpinThermoValidationError(kind, f"некорректные значения полей: {e}")


def model_to_dict(model: ModelParams) -> dict:
    payload = {"schema_version": SCHEMA_VERSION}
    payload.update(model.to_dict())
    return payload


def load_model(path: Union[str, Path]) -> ModelParams:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SpinThermoValidationError("model_file", f"не удалось прочитать {path}: {e}")
    return model_from_dict(payload)


def save_model(model: ModelParams, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model), indent=2), encoding="utf-8")
    return path


# ===================== ДИСПЕТЧЕРИЗАЦИЯ =====================

def render_model(model: ModelParams) -> SpinHamiltonian:
    if isinstance(model, SpinHamiltonian):
        return model
    if isinstance(model, StarParams):
        return build_star(model)
    if isinstance(model, StarChainParams):
        return build_star_chain(model)
    if isinstance(model, IsingParams):
        return build_ising_1d(model)
    return build_all_to_all(model)


def analytic_stats(model: ModelParams, beta: float = 1.0) -> Optional[ThermalStats]:
    """Статистика по замкнутым формулам; None для произвольного гамильтониана"""
    if isinstance(model, StarParams):
        return star_stats(model, beta)
    if isinstance(model, StarChainParams):
        return star_chain_stats(model, beta)
    if isinstance(model, IsingParams):
        return ising_1d_stats(model.h, model.j, model.n_spins, beta)
    if isinstance(model, AllToAllParams):
        return thermal_stats(all_to_all_spectrum(model.h, model.j, model.n_spins), beta)
    return None


def analytic_spectrum(model: ModelParams) -> Optional[Spectrum]:
    if isinstance(model, StarParams):
        return star_spectrum(model)
    if isinstance(model, StarChainParams):
        return star_chain_spectrum(model)
    if isinstance(model, IsingParams):
        return ising_1d_spectrum(model)
    if isinstance(model, AllToAllParams):
        return all_to_all_spectrum(model.h, model.j, model.n_spins)
    return None
