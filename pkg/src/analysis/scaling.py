"""
Масштабирование оптимальных параметров и теплоёмкости с числом спинов N
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from src.enumeration import enumerate_spectrum
from src.exceptions import DomainError
from src.models import SpinHamiltonian, ksat_reference_curve, tied_model
from src.optimizer import ExplicitInit, OptimizerConfig, tied_model_optimize, warm_start_chain
from src.optimizer.spaces import tied_default_values
from src.thermo import c_opt, single_spin_c_max

logger = logging.getLogger(__name__)

PROTOCOLS = ("unconstrained", "constrained")
COMPARISON_MODELS = ("c_opt", "star", "star_chain", "ising", "all_to_all", "ksat", "non_interacting")


# ===================== КРИВЫЕ =====================

@dataclass(frozen=True)
class PowerLawFit:
    """value ~ prefactor * N^exponent; residual - СКО в логарифмах"""

    exponent: float
    prefactor: float
    residual: float
    window: Tuple[int, int]
    n_points: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "residual": self.residual,
            "window": list(self.window),
            "n_points": self.n_points,
        }


def fit_power_law(points: Iterable[Tuple[float, float]], window: Tuple[int, int]) -> PowerLawFit:
    """МНК по точкам (log N, log |value|) с N внутри окна [lo, hi]"""
    lo, hi = window
    selected = [(n, abs(v)) for n, v in points if lo <= n <= hi and v != 0]
    if len(selected) < 2:
        raise DomainError(f"в окне [{lo}, {hi}] меньше двух точек")
    x = np.log([n for n, _ in selected])
    y = np.log([v for _, v in selected])
    (slope, intercept), residuals, *_ = np.linalg.lstsq(np.stack([x, np.ones_like(x)], axis=1), y, rcond=None)
    rss = float(residuals[0]) if residuals.size else 0.0
    return PowerLawFit(
        exponent=float(slope),
        prefactor=float(math.exp(intercept)),
        residual=math.sqrt(rss / len(selected)),
        window=(int(lo), int(hi)),
        n_points=len(selected),
    )


@dataclass
class ScalingCurve:
    name: str
    points: List[Tuple[int, float]] = field(default_factory=list)
    params: List[Dict[str, float]] = field(default_factory=list)
    power_law: Optional[PowerLawFit] = None
    note: str = ""

    def add(self, n: int, value: float, **extra: float):
        self.points.append((int(n), float(value)))
        self.params.append({k: float(v) for k, v in extra.items()})

    @property
    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points])

    def value_at(self, n: int) -> float:
        for point_n, value in self.points:
            if point_n == n:
                return value
        raise KeyError(n)

    def fit(self, window: Tuple[int, int]) -> PowerLawFit:
        self.power_law = fit_power_law(self.points, window)
        return self.power_law

    def columns(self) -> List[str]:
        keys: List[str] = []
        for extra in self.params:
            keys.extend(k for k in extra if k not in keys)
        return ["n", "value"] + [f"param:{k}" for k in keys]

    def rows(self) -> List[list]:
        keys = [c.split(":", 1)[1] for c in self.columns()[2:]]
        return [[n, v] + [extra.get(k, "") for k in keys] for (n, v), extra in zip(self.points, self.params)]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "points": [[n, v] for n, v in self.points],
            "params": self.params,
            "fit": self.power_law.to_dict() if self.power_law else None,
            "note": self.note,
        }


# ===================== АНАЛИТИЧЕСКИЕ ОПТИМУМЫ =====================

def _starts(model: str, n_spins: int, family, beta: float) -> List[Tuple[float, ...]]:
    base = tied_default_values(model, n_spins)
    if model == "star_constrained":
        # вне окрестности оптимума C экспоненциально мала и градиент не ведёт к нему
        grid = np.geomspace(0.05, max(8.0, float(n_spins)), 96)
        values = [family.stats((b,), beta).heat_capacity for b in grid]
        scanned = float(grid[int(np.argmax(values))])
        return [(scanned,), (n_spins * math.log(2.0) / 4.0,), base]
    if model in ("ising", "all_to_all"):
        # оба знака поля и связи
        return [(sh * base[0], sj * base[1]) for sh in (1, -1) for sj in (1, -1)]
    if model == "star":
        b = n_spins * math.log(2.0) / 4.0
        return [base, (b * (n_spins - 3), b)]
    if model == "star_chain":
        scale = max(1.0, n_spins / 16.0)
        return [base, tuple(v * scale for v in base)]
    return [base]


def analytic_optimum(
    model: str,
    n_spins: int,
    beta: float = 1.0,
    starts: Optional[Sequence[Sequence[float]]] = None,
    leaves_per_unit: int = 3,
    open_chain: bool = False,
):
    """
    Максимум C семейства по аналитическому ln Z: L-BFGS-B из нескольких стартовых точек

    Returns:
        Tuple[float, np.ndarray]: (C, theta)
    """
    family = tied_model(model, n_spins, leaves_per_unit, open_chain).family

    def loss(theta):
        stats, gradient = family.heat_capacity_gradient(theta, beta)
        return -stats.heat_capacity, -gradient

    best_c, best_theta = -math.inf, None
    for start in starts or _starts(model, n_spins, family, beta):
        try:
            result = minimize(loss, np.asarray(start, dtype=np.float64), jac=True, method="L-BFGS-B")
        except (FloatingPointError, ValueError) as e:
            logger.error(f"{model} N={n_spins}: старт {tuple(start)} не сошёлся: {e}")
            continue
        if np.isfinite(result.fun) and -result.fun > best_c:
            best_c, best_theta = float(-result.fun), result.x
    if best_theta is None:
        raise DomainError(f"{model} N={n_spins}: ни один старт не дал конечной C")
    return best_c, best_theta


def comparison_curves(
    n_range: Sequence[int],
    beta: float = 1.0,
    models: Sequence[str] = COMPARISON_MODELS,
) -> Dict[str, ScalingCurve]:
    """C_max(N) для оптимальной границы, известных моделей и невзаимодействующих спинов"""
    unknown = set(models) - set(COMPARISON_MODELS)
    if unknown:
        raise DomainError(f"неизвестные модели сравнения: {', '.join(sorted(unknown))}")
    single_spin = single_spin_c_max()[1]
    curves = {name: ScalingCurve(name) for name in models}

    for n in n_range:
        for name in models:
            if name == "c_opt":
                curves[name].add(n, c_opt(2 ** n))
            elif name == "non_interacting":
                curves[name].add(n, single_spin * n)
            elif name == "ksat":
                if n >= 4 and n % 2 == 0:
                    curves[name].add(n, ksat_reference_curve(n))
            elif name == "star_chain":
                if n >= 4 and n % 4 == 0:
                    value, theta = analytic_optimum(name, n, beta)
                    curves[name].add(n, value, a=theta[0], b=theta[1], j=theta[2])
            elif name == "ising":
                if n >= 3:
                    value, theta = analytic_optimum(name, n, beta)
                    curves[name].add(n, value, h=theta[0], j=theta[1])
            elif name == "all_to_all":
                if n >= 2:
                    value, theta = analytic_optimum(name, n, beta)
                    curves[name].add(n, value, h=theta[0], j=theta[1])
            elif name == "star":
                if n >= 3:
                    value, theta = analytic_optimum(name, n, beta)
                    curves[name].add(n, value, a=theta[0], b=theta[1])
        logger.info(f"Кривые сравнения: N={n} готово")
    return curves


# ===================== ИССЛЕДОВАНИЕ ПАРАМЕТРОВ =====================

# Протоколы: число шагов, шаг обучения и начальная точка при наименьшем N
PROTOCOL_CONFIGS: Dict[str, OptimizerConfig] = {
    "unconstrained": OptimizerConfig(steps=6000, learning_rate=0.01),
    "constrained": OptimizerConfig(steps=6000, learning_rate=0.001),
    "star_chain": OptimizerConfig(steps=6000, learning_rate=0.003),
}


def protocol_config(model: str, protocol: str) -> OptimizerConfig:
    return PROTOCOL_CONFIGS["star_chain" if model == "star_chain" else protocol]


def _polish(
    family_name: str, n: int, run, beta: float, open_chain: bool = False,
) -> Tuple[float, Dict[str, float], str]:
    """Доводка L-BFGS-B из лучшей точки ADAM; берётся, только если C не уменьшилась"""
    try:
        value, theta = analytic_optimum(family_name, n, beta, starts=[run.best_theta], open_chain=open_chain)
    except DomainError as e:
        logger.error(f"{family_name} N={n}: доводка не удалась: {e}")
        return run.best_c, dict(run.best_params), "adam"
    if value < run.best_c:
        return run.best_c, dict(run.best_params), "adam"
    return value, tied_model(family_name, n, 3, open_chain).named(theta), "adam+lbfgs"


def parameter_scaling_study(
    model: str,
    n_range: Sequence[int],
    protocol: str = "unconstrained",
    cfg: Optional[OptimizerConfig] = None,
    beta: float = 1.0,
    windows: Optional[Dict[str, Tuple[int, int]]] = None,
    polish: bool = False,
    open_chain: bool = False,
) -> Dict[str, ScalingCurve]:
    """
    Оптимальные параметры a(N), b(N), [J(N)] и C(N) по N

    Для Star протокол "unconstrained" - связь a = b(N - 3) и тёплый старт по N,
    "constrained" - свободные (a, b) из (2N - 3, 2.2) при каждом N.
    Star-chain всегда идёт тёплым стартом по N.
    open_chain - центры Star-chain образуют путь, а не кольцо;
    опубликованные строки таблиц параметров следуют этому соглашению.

    Args:
        polish: доводка L-BFGS-B после ADAM; для "constrained" не применяется -
            оптимум лежит на пологом гребне, и результат ADAM зависит от старта
    """
    if protocol not in PROTOCOLS:
        raise DomainError(f"неизвестный протокол {protocol!r}, доступны: {', '.join(PROTOCOLS)}")
    if model not in ("star", "star_chain"):
        raise DomainError(f"исследование параметров определено для star и star_chain, получено {model!r}")
    cfg = cfg or protocol_config(model, protocol)
    n_values = sorted(n_range)

    if model == "star" and protocol == "constrained":
        family_name = "star"
        runs = [
            tied_model_optimize("star", replace(cfg, init=ExplicitInit(tied_default_values("star", n))), n, beta)
            for n in n_values
        ]
    elif model == "star":
        family_name = "star_constrained"
        runs = warm_start_chain(family_name, n_values, cfg, beta)
    else:
        family_name = "star_chain"
        runs = warm_start_chain(family_name, n_values, cfg, beta, open_chain=open_chain)
    polish = polish and family_name != "star"

    curves: Dict[str, ScalingCurve] = {"c": ScalingCurve(f"{model}_{protocol}_c")}
    sources = set()
    for n, run in zip(n_values, runs):
        if polish:
            value, params, source = _polish(family_name, n, run, beta, open_chain)
        else:
            value, params, source = run.best_c, dict(run.best_params), "adam"
        sources.add(source)
        curves["c"].add(n, value, **params)
        for name, param in params.items():
            curves.setdefault(name, ScalingCurve(f"{model}_{protocol}_{name}")).add(n, param)

    note = ",".join(sorted(sources))
    for curve in curves.values():
        curve.note = note
    for name, window in (windows or {}).items():
        if name in curves:
            fit = curves[name].fit(window)
            logger.info(f"{model}/{protocol}: {name} ~ N^{fit.exponent:.3f} в окне {window}")
    return curves


# ===================== ВЫРОЖДЕННОСТЬ =====================

def conjectured_degeneracy(n_spins: int) -> int:
    """Предполагаемая максимальная кратность первого возбуждённого уровня при единственном основном"""
    return 2 ** (n_spins - 1) + n_spins - 1


def degeneracy_conjecture_report(hamiltonians: Sequence[SpinHamiltonian]) -> List[dict]:
    """Кратности уровней найденных гамильтонианов рядом с 2^{N-1} + N - 1; только отчёт"""
    rows = []
    for hm in hamiltonians:
        spectrum = enumerate_spectrum(hm)
        first = spectrum.first_excited_degeneracy
        bound = conjectured_degeneracy(hm.n_spins)
        rows.append({
            "n_spins": hm.n_spins,
            "ground_degeneracy": spectrum.degeneracies[0],
            "first_excited_degeneracy": first,
            "conjectured_max": bound,
            "within_conjecture": None if spectrum.degeneracies[0] != 1 or first is None else first <= bound,
        })
        logger.info(f"N={hm.n_spins}: кратность первого возбуждённого {first}, гипотеза {bound}")
    return rows
