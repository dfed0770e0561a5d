"""
Конфигурация эксперимента для команд optimize и chimera
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from src.analysis import NoiseSpec
from src.exceptions import SpinThermoValidationError
from src.models import MAX_SPINS, TIED_MODELS
from src.optimizer import OptimizerConfig

SCHEMA_VERSION = 1
SPACES = ("direct", "bounded", "tied")


@dataclass
class ExperimentConfig:
    name: str
    space: str
    n_spins: int
    model: Optional[str] = None
    topology: Union[str, list] = "complete"
    beta: float = 1.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    leaves_per_unit: int = 3
    open_chain: bool = False
    parallel: bool = False
    noise: Optional[NoiseSpec] = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise SpinThermoValidationError("schema_version", f"поддерживается только {SCHEMA_VERSION}")
        if not self.name or "/" in self.name:
            raise SpinThermoValidationError("name", "непустое имя без '/'")
        if self.space not in SPACES:
            raise SpinThermoValidationError("space", f"ожидалось одно из {SPACES}, получено {self.space!r}")
        if not isinstance(self.n_spins, int) or self.n_spins < 1:
            raise SpinThermoValidationError("n_spins", "целое >= 1")
        if self.space == "tied":
            if self.model not in TIED_MODELS:
                raise SpinThermoValidationError("model", f"ожидалось одно из {TIED_MODELS}")
        elif self.n_spins > MAX_SPINS:
            raise SpinThermoValidationError("n_spins", f"прямое пространство ограничено {MAX_SPINS} спинами")
        if self.space == "bounded" and self.optimizer.bound_c is None:
            raise SpinThermoValidationError("optimizer.bound_c", "обязательно для space = bounded")
        if not self.beta > 0:
            raise SpinThermoValidationError("beta", "должна быть положительной")

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        if not isinstance(payload, dict):
            raise SpinThermoValidationError("config", "ожидался объект JSON")
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            raise SpinThermoValidationError("config", f"неизвестные поля: {', '.join(sorted(unknown))}")
        if "schema_version" not in payload:
            raise SpinThermoValidationError("schema_version", "обязательное поле")
        for key in ("name", "space", "n_spins"):
            if key not in payload:
                raise SpinThermoValidationError(key, "обязательное поле")
        values = dict(payload)
        values["optimizer"] = OptimizerConfig.from_dict(payload.get("optimizer", {}))
        if payload.get("noise") is not None:
            values["noise"] = NoiseSpec.from_dict(payload["noise"])
        try:
            return cls(**values)
        except TypeError as e:
            raise SpinThermoValidationError("config", str(e))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        path = Path(path)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise SpinThermoValidationError("config", f"не удалось прочитать {path}: {e}")
        except json.JSONDecodeError as e:
            raise SpinThermoValidationError("config", f"{path}: некорректный JSON ({e})")
        return cls.from_dict(payload)

    def to_dict(self) -> dict:
        payload = {
            "schema_version": self.schema_version,
            "name": self.name,
            "space": self.space,
            "n_spins": self.n_spins,
            "model": self.model,
            "topology": self.topology,
            "beta": self.beta,
            "optimizer": self.optimizer.to_dict(),
            "leaves_per_unit": self.leaves_per_unit,
            "open_chain": self.open_chain,
            "parallel": self.parallel,
        }
        if self.noise is not None:
            payload["noise"] = {**self.noise.__dict__, "deviations": list(self.noise.deviations)}
        return payload
