"""
Конфигурация оптимизатора: шаг обучения, расписания и инициализация параметров
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple, Union

from src.exceptions import SpinThermoValidationError


@dataclass(frozen=True)
class FixedSchedule:
    kind: str = "fixed"


@dataclass(frozen=True)
class CyclicSchedule:
    """Треугольная волна между alpha_min и alpha_max, подъём за up_steps шагов"""

    alpha_min: float
    alpha_max: float
    up_steps: int
    halve_each_cycle: bool = True
    kind: str = "cyclic_triangular"

    def __post_init__(self):
        if not 0 < self.alpha_min < self.alpha_max:
            raise SpinThermoValidationError("schedule", "требуется 0 < alpha_min < alpha_max")
        if self.up_steps < 1:
            raise SpinThermoValidationError("schedule.up_steps", "должно быть >= 1")


@dataclass(frozen=True)
class UniformInit:
    lo: float = -1.0
    hi: float = 0.0
    kind: str = "uniform"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise SpinThermoValidationError("init", "требуется lo < hi")


@dataclass(frozen=True)
class ExplicitInit:
    values: Tuple[float, ...]
    kind: str = "explicit"


@dataclass(frozen=True)
class WarmStart:
    """Старт из оптимума предыдущей задачи (например, при соседнем N)"""

    values: Tuple[float, ...]
    kind: str = "warm_start"


Schedule = Union[FixedSchedule, CyclicSchedule]
Init = Union[UniformInit, ExplicitInit, WarmStart]


def cyclic_lr(step: int, schedule: CyclicSchedule) -> float:
    """
    Треугольное расписание: cycle = floor(1 + step / (2 up)), x = |step / up - 2 cycle + 1|;
    при halve_each_cycle амплитуда цикла k (с нуля) делится на 2^k
    """
    cycle = math.floor(1 + step / (2 * schedule.up_steps))
    x = abs(step / schedule.up_steps - 2 * cycle + 1)
    amplitude = (schedule.alpha_max - schedule.alpha_min) * max(0.0, 1.0 - x)
    if schedule.halve_each_cycle:
        amplitude /= 2 ** (cycle - 1)
    return schedule.alpha_min + amplitude


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 60000
    learning_rate: float = 0.001
    schedule: Schedule = field(default_factory=FixedSchedule)
    init: Optional[Init] = None
    seed: int = 0
    restarts: int = 1
    bound_c: Optional[float] = None
    restart_learning_rates: Tuple[float, ...] = ()

    def __post_init__(self):
        # steps = 0 допустимо: лучшей точкой считается оценка начального приближения
        if self.steps < 0:
            raise SpinThermoValidationError("steps", "должно быть >= 0")
        if not self.learning_rate > 0:
            raise SpinThermoValidationError("learning_rate", "должна быть положительной")
        if self.restarts < 1:
            raise SpinThermoValidationError("restarts", "должно быть >= 1")
        if self.bound_c is not None and not self.bound_c > 0:
            raise SpinThermoValidationError("bound_c", "должна быть положительной")
        if any(not lr > 0 for lr in self.restart_learning_rates):
            raise SpinThermoValidationError("restart_learning_rates", "все значения должны быть положительными")
        if self.restart_learning_rates and isinstance(self.schedule, CyclicSchedule):
            raise SpinThermoValidationError(
                "restart_learning_rates", "несовместимо с циклическим расписанием"
            )

    def base_rate(self, restart: int) -> float:
        if self.restart_learning_rates:
            return self.restart_learning_rates[restart % len(self.restart_learning_rates)]
        return self.learning_rate

    def rate(self, step: int, restart: int = 0) -> float:
        if isinstance(self.schedule, CyclicSchedule):
            return cyclic_lr(step, self.schedule)
        return self.base_rate(restart)

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["restart_learning_rates"] = list(self.restart_learning_rates)
        if self.init is not None and hasattr(self.init, "values"):
            payload["init"]["values"] = list(self.init.values)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "OptimizerConfig":
        """Разбор словаря конфигурации с отказом на неизвестных ключах"""
        allowed = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - allowed
        if unknown:
            raise SpinThermoValidationError("optimizer", f"неизвестные поля: {', '.join(sorted(unknown))}")
        values = dict(payload)
        values["schedule"] = _schedule_from_dict(payload.get("schedule"))
        values["init"] = _init_from_dict(payload.get("init"))
        values["restart_learning_rates"] = tuple(payload.get("restart_learning_rates", ()))
        try:
            return cls(**values)
        except TypeError as e:
            raise SpinThermoValidationError("optimizer", str(e))


def _check_keys(payload: dict, allowed: set, where: str) -> dict:
    if not isinstance(payload, dict):
        raise SpinThermoValidationError(where, "ожидался объект")
    unknown = set(payload) - allowed
    if unknown:
        raise SpinThermoValidationError(where, f"неизвестные поля: {', '.join(sorted(unknown))}")
    return {k: v for k, v in payload.items() if k != "kind"}


def _schedule_from_dict(payload) -> Schedule:
    if payload is None:
        return FixedSchedule()
    kind = payload.get("kind") if isinstance(payload, dict) else None
    if kind == "fixed":
        _check_keys(payload, {"kind"}, "schedule")
        return FixedSchedule()
    if kind == "cyclic_triangular":
        values = _check_keys(payload, {"kind", "alpha_min", "alpha_max", "up_steps", "halve_each_cycle"}, "schedule")
        try:
            return CyclicSchedule(**values)
        except TypeError as e:
            raise SpinThermoValidationError("schedule", str(e))
    raise SpinThermoValidationError("schedule.kind", f"неизвестное расписание {kind!r}")


def _init_from_dict(payload) -> Optional[Init]:
    if payload is None:
        return None
    kind = payload.get("kind") if isinstance(payload, dict) else None
    if kind == "uniform":
        values = _check_keys(payload, {"kind", "lo", "hi"}, "init")
        return UniformInit(**values)
    if kind in ("explicit", "warm_start"):
        values = _check_keys(payload, {"kind", "values"}, "init")
        if "values" not in values:
            raise SpinThermoValidationError("init.values", "обязательное поле")
        cls = ExplicitInit if kind == "explicit" else WarmStart
        return cls(tuple(float(v) for v in values["values"]))
    raise SpinThermoValidationError("init.kind", f"неизвестная инициализация {kind!r}")
