"""
Энергетический спектр: упорядоченный список уровней (энергия, кратность вырождения)
"""

import json
import logging
import math
from dataclasses import dataclass
from numbers import Integral
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import SpinThermoValidationError

logger = logging.getLogger(__name__)

# Допуск слияния уровней (абсолютный, после сдвига основного состояния в 0)
MERGE_TOLERANCE = 1e-9


def _as_degeneracy(value, index: int) -> int:
    """Проверка кратности: целое число >= 1 (python int без ограничения разрядности)"""
    if isinstance(value, bool) or not isinstance(value, Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise SpinThermoValidationError(
                f"levels[{index}].degeneracy", f"ожидалось целое, получено {value!r}"
            )
    value = int(value)
    if value < 1:
        raise SpinThermoValidationError(f"levels[{index}].degeneracy", f"должна быть >= 1, получено {value}")
    return value


@dataclass(frozen=True)
class Spectrum:
    """Спектр гамильтониана: уровни по возрастанию энергии с кратностями"""

    energies: Tuple[float, ...]
    degeneracies: Tuple[int, ...]

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        degeneracies = tuple(_as_degeneracy(g, i) for i, g in enumerate(self.degeneracies))
        if not energies:
            raise SpinThermoValidationError("levels", "спектр должен содержать хотя бы один уровень")
        if len(energies) != len(degeneracies):
            raise SpinThermoValidationError("levels", "число энергий не совпадает с числом кратностей")
        for i, e in enumerate(energies):
            if not math.isfinite(e):
                raise SpinThermoValidationError(f"levels[{i}].energy", f"нефинитная энергия {e}")
        for i in range(1, len(energies)):
            if energies[i] - energies[i - 1] <= MERGE_TOLERANCE:
                raise SpinThermoValidationError(
                    f"levels[{i}].energy",
                    f"уровни не упорядочены строго или ближе допуска слияния: "
                    f"{energies[i - 1]!r}, {energies[i]!r}",
                )
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "degeneracies", degeneracies)

    # ===================== КОНСТРУКТОРЫ =====================

    @classmethod
    def from_levels(cls, levels: Iterable[Sequence]) -> "Spectrum":
        """Из пар (энергия, кратность), уже упорядоченных и различных"""
        pairs = [tuple(level) for level in levels]
        for i, pair in enumerate(pairs):
            if len(pair) != 2:
                raise SpinThermoValidationError(f"levels[{i}]", "ожидалась пара [energy, degeneracy]")
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def from_energies(
        cls,
        energies,
        degeneracies: Optional[Sequence[int]] = None,
        tolerance: float = MERGE_TOLERANCE,
    ) -> "Spectrum":
        """
        Построение спектра из сырого набора энергий

        Энергии сортируются, соседние значения ближе допуска сливаются в один уровень
        (энергия уровня = наименьшая энергия кластера), кратности суммируются.
        """
        values = np.asarray(energies, dtype=np.float64).ravel()
        if values.size == 0:
            raise SpinThermoValidationError("energies", "пустой набор энергий")
        if not np.all(np.isfinite(values)):
            raise SpinThermoValidationError("energies", "нефинитные энергии")

        order = np.argsort(values, kind="stable")
        ordered = values[order]
        starts = np.concatenate(([0], np.flatnonzero(np.diff(ordered) > tolerance) + 1))
        level_energies = tuple(float(e) for e in ordered[starts])

        if degeneracies is None:
            bounds = np.append(starts, ordered.size)
            counts = tuple(int(c) for c in np.diff(bounds))
            return cls(level_energies, counts)

        if len(degeneracies) != values.size:
            raise SpinThermoValidationError("degeneracies", "длина не совпадает с числом энергий")
        weights = [_as_degeneracy(degeneracies[i], i) for i in order]
        bounds = list(starts) + [ordered.size]
        counts = tuple(sum(weights[bounds[k]:bounds[k + 1]]) for k in range(len(starts)))
        return cls(level_energies, counts)

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        """Разбор JSON-массива пар [energy, degeneracy]"""
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpinThermoValidationError("spectrum", f"некорректный JSON: {e}")
        if not isinstance(payload, list):
            raise SpinThermoValidationError("spectrum", "ожидался массив уровней")
        return cls.from_levels(payload)

    # ===================== СВОЙСТВА =====================

    @property
    def levels(self) -> List[Tuple[float, int]]:
        return list(zip(self.energies, self.degeneracies))

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @property
    def total_dim(self) -> int:
        return sum(self.degeneracies)

    @property
    def ground_energy(self) -> float:
        return self.energies[0]

    @property
    def first_excited_degeneracy(self) -> Optional[int]:
        return self.degeneracies[1] if self.n_levels > 1 else None

    def energy_array(self) -> np.ndarray:
        return np.asarray(self.energies, dtype=np.float64)

    def log_degeneracies(self) -> np.ndarray:
        # math.log работает с python int любой длины
        return np.array([math.log(g) for g in self.degeneracies], dtype=np.float64)

    def shifted(self, offset: Optional[float] = None) -> "Spectrum":
        """Сдвиг всех энергий; по умолчанию основное состояние переносится в 0"""
        offset = self.ground_energy if offset is None else offset
        return Spectrum(tuple(e - offset for e in self.energies), self.degeneracies)

    # ===================== СЕРИАЛИЗАЦИЯ =====================

    def to_list(self) -> List[list]:
        ground = self.ground_energy
        return [[e - ground, g] for e, g in zip(self.energies, self.degeneracies)]

    def to_json(self) -> str:
        return json.dumps(self.to_list())
