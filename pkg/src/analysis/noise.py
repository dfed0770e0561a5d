"""
Устойчивость оптимальных спектров к шуму: сдвиг щели, расщепление вырожденного
уровня в полосу и асимметрия поле/связь у листьев Star
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from src.analysis.scaling import ScalingCurve
from src.enumeration import enumerate_stats
from src.exceptions import DomainError, SizeLimitError, SpinThermoValidationError
from src.models import SpinHamiltonian, StarParams, star_stats
from src.models.hamiltonian import star_topology
from src.thermo.stats import stats_from_log_weights

logger = logging.getLogger(__name__)

NOISE_KINDS = ("uniform_gap_shift", "bandwidth", "coupling_asymmetry")
DISTRIBUTIONS = ("uniform", "fixed_extremes")
MAX_BANDWIDTH_SPINS = 24
DEFAULT_TRIALS = 100


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    epsilon: float = 0.0
    delta: float = 0.0
    distribution: str = "uniform"
    deviations: Tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise SpinThermoValidationError("noise.kind", f"ожидалось одно из {NOISE_KINDS}, получено {self.kind!r}")
        if not self.delta >= 0:
            raise SpinThermoValidationError("noise.delta", "должна быть >= 0")
        if not self.epsilon > -1:
            raise SpinThermoValidationError("noise.epsilon", "должна быть > -1")
        if self.distribution not in DISTRIBUTIONS:
            raise SpinThermoValidationError("noise.distribution", f"ожидалось одно из {DISTRIBUTIONS}")

    @classmethod
    def from_dict(cls, payload: dict) -> "NoiseSpec":
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            raise SpinThermoValidationError("noise", f"неизвестные поля: {', '.join(sorted(unknown))}")
        values = dict(payload)
        if "deviations" in values:
            values["deviations"] = tuple(float(v) for v in values["deviations"])
        return cls(**values)


# ===================== СДВИГ ЩЕЛИ =====================

def uniform_shift_variance(d: int, eps: float) -> float:
    """
    Дисперсия энергии спектра {(0, 1), ((1 + eps) ln d, d)} при beta = 1:
    (ln d)^2 (1 + eps)^2 / (4 cosh^2(eps ln d / 2))
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 2:
        raise DomainError(f"d должно быть целым >= 2, получено {d!r}")
    if not eps > -1:
        raise DomainError(f"eps должна быть > -1, получено {eps}")
    log_d = math.log(d)
    u = eps * log_d
    # 1/(4 cosh^2(u/2)) = expit(u) expit(-u)
    return log_d ** 2 * (1.0 + eps) ** 2 * float(expit(u) * expit(-u))


# ===================== ПОЛОСА ВЫРОЖДЕННОГО УРОВНЯ =====================

@dataclass
class BandwidthStudy:
    n_spins: int
    delta: float
    distribution: str
    seed: int
    unperturbed_c: float
    heat_capacities: List[float]
    ground_populations: List[float]
    bracket: Tuple[float, float]

    @property
    def ratios(self) -> np.ndarray:
        return np.asarray(self.heat_capacities) / self.unperturbed_c

    @property
    def bracket_holds(self) -> bool:
        lo, hi = self.bracket
        tol = 1e-12
        return all(lo - tol <= p <= hi + tol for p in self.ground_populations)

    def to_dict(self) -> dict:
        ratios = self.ratios
        return {
            "n_spins": self.n_spins,
            "delta": self.delta,
            "distribution": self.distribution,
            "seed": self.seed,
            "unperturbed_c": self.unperturbed_c,
            "trials": len(self.heat_capacities),
            "min_ratio": float(ratios.min()),
            "mean_ratio": float(ratios.mean()),
            "bracket": list(self.bracket),
            "bracket_holds": self.bracket_holds,
        }


def _band_stats(gap: float, band: np.ndarray):
    # Основное состояние в -gap, d уровней полосы вокруг 0
    energies = np.concatenate([[-gap], band])
    log_w = -energies
    stats = stats_from_log_weights(energies, log_w, 1.0)
    p0 = math.exp(log_w[0] - stats.log_partition)
    return stats, p0


def bandwidth_perturbation_study(
    n_spins: int,
    delta: float,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    distribution: str = "uniform",
) -> BandwidthStudy:
    """
    Первый возбуждённый уровень (кратность d = 2^N - 1, щель ln d) расщепляется
    в d энергий из [-delta, delta]; beta = 1
    """
    if n_spins < 2:
        raise DomainError(f"требуется N >= 2, получено {n_spins}")
    if n_spins > MAX_BANDWIDTH_SPINS:
        raise SizeLimitError(f"исследование полосы ограничено {MAX_BANDWIDTH_SPINS} спинами")
    if delta < 0:
        raise DomainError("delta должна быть >= 0")
    if distribution not in DISTRIBUTIONS:
        raise DomainError(f"неизвестное распределение {distribution!r}")
    if trials < 1:
        raise DomainError("trials должно быть >= 1")

    d = 2 ** n_spins - 1
    gap = math.log(d)
    clean, _ = _band_stats(gap, np.zeros(d))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(n_spins)]))

    heat_capacities, populations = [], []
    for _ in range(trials):
        if distribution == "uniform":
            band = rng.uniform(-delta, delta, d)
        else:
            band = delta * rng.choice([-1.0, 1.0], d)
        stats, p0 = _band_stats(gap, band)
        heat_capacities.append(stats.heat_capacity)
        populations.append(p0)

    study = BandwidthStudy(
        n_spins=n_spins,
        delta=float(delta),
        distribution=distribution,
        seed=seed,
        unperturbed_c=clean.heat_capacity,
        heat_capacities=heat_capacities,
        ground_populations=populations,
        bracket=(float(expit(-delta)), float(expit(delta))),
    )
    logger.info(
        f"Полоса delta={delta}, N={n_spins}: C/C0 от {study.ratios.min():.4f} до {study.ratios.max():.4f}"
    )
    return study


def bandwidth_scaling_curve(
    n_range: Sequence[int],
    delta: float,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    distribution: str = "uniform",
    window: Optional[Tuple[int, int]] = None,
) -> ScalingCurve:
    """Средняя C при расщеплённом уровне как функция N"""
    curve = ScalingCurve(name=f"bandwidth_delta_{delta:g}")
    for n in n_range:
        study = bandwidth_perturbation_study(n, delta, trials, seed, distribution)
        curve.add(n, float(np.mean(study.heat_capacities)),
                  unperturbed=study.unperturbed_c, min_ratio=float(study.ratios.min()))
    if window is not None:
        curve.fit(window)
    return curve


# ===================== АСИММЕТРИЯ ПОЛЕ/СВЯЗЬ =====================

@dataclass
class AsymmetryReport:
    n_spins: int
    heat_capacity: float
    clean_heat_capacity: float
    bandwidth: float
    deviations: List[float] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.heat_capacity / self.clean_heat_capacity

    def to_dict(self) -> dict:
        return {
            "n_spins": self.n_spins,
            "heat_capacity": self.heat_capacity,
            "clean_heat_capacity": self.clean_heat_capacity,
            "ratio": self.ratio,
            "bandwidth": self.bandwidth,
            "deviations": self.deviations,
        }


def build_noisy_star(star: StarParams, deviations: Sequence[float]) -> SpinHamiltonian:
    """Star с независимыми полями b + dev_i/2 и связями b - dev_i/2 у листьев"""
    n = star.n_spins
    dev = np.asarray(deviations, dtype=np.float64)
    if dev.shape != (n - 1,):
        raise SpinThermoValidationError("deviations", f"ожидалось {n - 1} значений, получено {dev.size}")
    fields = np.concatenate([[star.a], star.b + dev / 2.0])
    couplings = {(0, i): float(star.b - dev[i - 1] / 2.0) for i in range(1, n)}
    return SpinHamiltonian(n, fields, couplings, star_topology(n))


def coupling_asymmetry_study(star: StarParams, deviations: Sequence[float], beta: float = 1.0) -> AsymmetryReport:
    """
    При s_hub = -1 уровень -a расщепляется в -a + sum_i s_i dev_i,
    ширина полосы 2 sum |dev_i|
    """
    noisy = build_noisy_star(star, deviations)
    bandwidth = 2.0 * float(np.abs(np.asarray(deviations, dtype=np.float64)).sum())
    report = AsymmetryReport(
        n_spins=star.n_spins,
        heat_capacity=enumerate_stats(noisy, beta).heat_capacity,
        clean_heat_capacity=star_stats(star, beta).heat_capacity,
        bandwidth=bandwidth,
        deviations=[float(v) for v in deviations],
    )
    logger.info(f"Асимметрия N={star.n_spins}: полоса {bandwidth:.4f}, C/C0 = {report.ratio:.4f}")
    return report
