"""
Исключения пакета spinthermo
"""

from typing import Optional, Sequence


class SpinThermoError(Exception):
    """Базовое исключение для всех ошибок пакета"""
    pass


class SpinThermoValidationError(SpinThermoError, ValueError):
    """Структурированная ошибка валидации входных данных"""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")

    def __reduce__(self):
        return (self.__class__, (self.field, self.reason))


class DomainError(SpinThermoError, ValueError):
    """Аргумент вне области определения операции"""
    pass


class SizeLimitError(DomainError):
    """Система слишком велика для точного перебора"""
    pass


class NumericalTripwireError(SpinThermoError):
    """Аналитический и переборный результаты разошлись"""
    pass


class OptimizationAborted(SpinThermoError):
    """Запуск ADAM прерван (нефинитный градиент)"""

    def __init__(self, step: int, reason: str, theta: Optional[Sequence[float]] = None):
        self.step = step
        self.reason = reason
        self.theta = list(theta) if theta is not None else None
        super().__init__(f"шаг {step}: {reason}")

    def __reduce__(self):
        return (self.__class__, (self.step, self.reason, self.theta))


class RestartsExhausted(SpinThermoError):
    """Ни один из перезапусков не завершился"""
    pass


class RuntimeGateRefused(SpinThermoError):
    """Долгий запуск без явного разрешения"""

    def __init__(self, message: str, estimate_hours: float):
        self.estimate_hours = estimate_hours
        super().__init__(message)

    def __reduce__(self):
        return (self.__class__, (str(self), self.estimate_hours))
