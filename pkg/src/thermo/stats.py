"""
Термодинамика на уровне спектра: гиббсовы населённости, теплоёмкость,
идеальная вырожденная модель, оптимальная щель и граница ошибки термометра
"""

import logging
import math
from dataclasses import dataclass, field
from numbers import Integral
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit, logsumexp

from src.exceptions import DomainError, SpinThermoValidationError
from src.thermo.spectrum import Spectrum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThermalStats:
    """Равновесная статистика при обратной температуре beta"""

    beta: float
    log_partition: float
    mean_energy: float
    energy_variance: float
    heat_capacity: float
    third_central_moment: Optional[float] = None

    @property
    def heat_capacity_beta_derivative(self) -> Optional[float]:
        """dC/dbeta = 2*beta*Var - beta^2 * mu3"""
        if self.third_central_moment is None:
            return None
        return 2.0 * self.beta * self.energy_variance - self.beta ** 2 * self.third_central_moment

    def to_dict(self) -> Dict[str, float]:
        return {
            "beta": self.beta,
            "log_partition": self.log_partition,
            "mean_energy": self.mean_energy,
            "energy_variance": self.energy_variance,
            "heat_capacity": self.heat_capacity,
        }


def validate_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0:
        raise DomainError(f"beta должна быть положительной, получено {beta}")
    return beta


def _log_weights(s: Spectrum, beta: float) -> np.ndarray:
    return s.log_degeneracies() - beta * s.energy_array()


def gibbs_populations(s: Spectrum, beta: float = 1.0) -> List[Tuple[int, float]]:
    """Населённости уровней p_i = g_i exp(-beta E_i) / Z"""
    if not isinstance(s, Spectrum):
        raise SpinThermoValidationError("spectrum", f"ожидался Spectrum, получено {type(s).__name__}")
    beta = validate_beta(beta)
    log_w = _log_weights(s, beta)
    populations = np.exp(log_w - logsumexp(log_w))
    return list(enumerate(populations.tolist()))


def stats_from_log_weights(energies: np.ndarray, log_w: np.ndarray, beta: float) -> ThermalStats:
    """Общая сборка статистики по логарифмам весов уровней"""
    log_z = float(logsumexp(log_w))
    p = np.exp(log_w - log_z)
    mean = float(np.dot(p, energies))
    centered = energies - mean
    variance = max(float(np.dot(p, centered * centered)), 0.0)
    third = float(np.dot(p, centered ** 3))
    return ThermalStats(
        beta=beta,
        log_partition=log_z,
        mean_energy=mean,
        energy_variance=variance,
        heat_capacity=beta * beta * variance,
        third_central_moment=third,
    )


def thermal_stats(s: Spectrum, beta: float = 1.0) -> ThermalStats:
    """ln Z, <E>, Var(E) и C = beta^2 Var(E) для спектра"""
    if not isinstance(s, Spectrum):
        raise SpinThermoValidationError("spectrum", f"ожидался Spectrum, получено {type(s).__name__}")
    beta = validate_beta(beta)
    return stats_from_log_weights(s.energy_array(), _log_weights(s, beta), beta)


# ===================== ВЫРОЖДЕННАЯ МОДЕЛЬ =====================

def _validate_dim(D, minimum: int) -> int:
    if isinstance(D, bool) or not isinstance(D, Integral):
        raise DomainError(f"размерность D должна быть целой, получено {D!r}")
    D = int(D)
    if D < minimum:
        raise DomainError(f"размерность D должна быть >= {minimum}, получено {D}")
    return D


@dataclass(frozen=True)
class DegenerateModel:
    """Основное состояние и (D-1)-кратно вырожденный возбуждённый уровень на щели gap"""

    dim: int
    gap: float

    def __post_init__(self):
        _validate_dim(self.dim, 2)
        if not self.gap > 0:
            raise DomainError(f"щель должна быть положительной, получено {self.gap}")

    def spectrum(self) -> Spectrum:
        return Spectrum((0.0, float(self.gap)), (1, self.dim - 1))

    def stats(self, beta: float = 1.0) -> ThermalStats:
        return thermal_stats(self.spectrum(), beta)


def optimal_gap(D: int) -> float:
    """
    Щель x > 2, решающая e^x (x - 2) = (D - 1)(x + 2)

    Уравнение решается в логарифмической форме
    x + ln(x - 2) - ln(D - 1) - ln(x + 2) = 0, левая часть строго возрастает на (2, inf).
    """
    D = _validate_dim(D, 3)
    log_d1 = math.log(D - 1)

    def residual(x: float) -> float:
        return x + math.log(x - 2.0) - log_d1 - math.log(x + 2.0)

    x = brentq(residual, 2.0 + 1e-12, 2.0 + log_d1 + 20.0, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    # Ньютон для полировки последнего ulp
    for _ in range(2):
        derivative = 1.0 + 1.0 / (x - 2.0) - 1.0 / (x + 2.0)
        x -= residual(x) / derivative
    return float(x)


def degenerate_heat_capacity(D: int, x: float) -> float:
    """x^2 e^x (D-1) / (D-1+e^x)^2 без переполнения для больших D"""
    t = math.log(D - 1) - x
    return float(x * x * expit(t) * expit(-t))


def c_opt(D: int) -> float:
    """Максимальная теплоёмкость среди всех спектров размерности D"""
    return degenerate_heat_capacity(D, optimal_gap(D))


def estimation_error_bound(C: float, nu: int) -> float:
    """Минимальная относительная среднеквадратичная ошибка температуры 1/(nu C)"""
    if not C > 0:
        raise DomainError(f"теплоёмкость должна быть положительной, получено {C}")
    if isinstance(nu, bool) or not isinstance(nu, Integral) or nu < 1:
        raise DomainError(f"число измерений nu должно быть целым >= 1, получено {nu!r}")
    return 1.0 / (nu * C)


# ===================== МАКСИМИЗАЦИЯ ПО ЩЕЛИ =====================

@dataclass(frozen=True)
class GapTemplate:
    """
    Параметризованный спектр: основное состояние в 0, первый возбуждённый уровень
    кратности first_degeneracy на щели E и дополнительные уровни на ratio * E (ratio >= 1)
    """

    first_degeneracy: int = 1
    extra_levels: Tuple[Tuple[float, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.first_degeneracy < 1:
            raise DomainError("кратность первого возбуждённого уровня должна быть >= 1")
        for ratio, degeneracy in self.extra_levels:
            if ratio < 1.0:
                raise DomainError(f"дополнительный уровень ниже щели: ratio={ratio}")
            if degeneracy < 1:
                raise DomainError("кратность дополнительного уровня должна быть >= 1")

    @property
    def total_dim(self) -> int:
        return 1 + self.first_degeneracy + sum(int(g) for _, g in self.extra_levels)

    def ratios(self) -> np.ndarray:
        return np.array([0.0, 1.0] + [float(r) for r, _ in self.extra_levels])

    def log_degeneracies(self) -> np.ndarray:
        degeneracies = [1, self.first_degeneracy] + [int(g) for _, g in self.extra_levels]
        return np.array([math.log(g) for g in degeneracies])

    def with_levels(self, extra: Sequence[Tuple[float, int]]) -> "GapTemplate":
        return GapTemplate(self.first_degeneracy, tuple(self.extra_levels) + tuple(extra))

    def spectrum(self, gap: float) -> Spectrum:
        energies = self.ratios() * gap
        degeneracies = [1, self.first_degeneracy] + [int(g) for _, g in self.extra_levels]
        return Spectrum.from_energies(energies, degeneracies)

    def heat_capacity_grid(self, gaps: np.ndarray, beta: float = 1.0) -> np.ndarray:
        """Теплоёмкость сразу для массива щелей"""
        energies = np.outer(gaps, self.ratios())
        log_w = self.log_degeneracies()[None, :] - beta * energies
        p = np.exp(log_w - logsumexp(log_w, axis=1, keepdims=True))
        mean = np.sum(p * energies, axis=1, keepdims=True)
        variance = np.sum(p * (energies - mean) ** 2, axis=1)
        return beta * beta * variance


SpectrumTemplate = Union[GapTemplate, Callable[[float], Spectrum]]


def max_c_over_gap(
    s_template: SpectrumTemplate,
    beta: float = 1.0,
    scan_points: int = 600,
    tolerance: float = 1e-10,
) -> Tuple[float, float]:
    """
    Одномерная максимизация C по щели E

    Лог-равномерный скан даёт затравку, затем ограниченный метод Брента уточняет максимум
    между соседними узлами скана. Унимодальность не проверяется.
    """
    beta = validate_beta(beta)
    if isinstance(s_template, GapTemplate):
        upper = 2.0 * math.log(s_template.total_dim) + 50.0

        def evaluate_grid(gaps: np.ndarray) -> np.ndarray:
            return s_template.heat_capacity_grid(gaps, beta)
    else:
        upper = 100.0

        def evaluate_grid(gaps: np.ndarray) -> np.ndarray:
            return np.array([thermal_stats(s_template(g), beta).heat_capacity for g in gaps])

    gaps = np.geomspace(1e-3, upper, scan_points)
    values = evaluate_grid(gaps)
    best = int(np.argmax(values))
    lo = gaps[max(best - 1, 0)]
    hi = gaps[min(best + 1, scan_points - 1)]

    result = minimize_scalar(
        lambda g: -float(evaluate_grid(np.array([g]))[0]),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tolerance, "maxiter": 500},
    )
    if -result.fun >= values[best]:
        return float(result.x), float(-result.fun)
    return float(gaps[best]), float(values[best])


def single_spin_c_max() -> Tuple[float, float]:
    """Случай D = 2: максимум теплоёмкости одного спина (щель ~2.40, C ~0.44)"""
    return max_c_over_gap(GapTemplate(first_degeneracy=1))
