"""
Модели сравнения: одномерная модель Изинга на кольце, однородная модель all-to-all
и эталонная кривая k-SAT
"""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.special import gammaln

from src.exceptions import DomainError
from src.models.hamiltonian import SpinHamiltonian, complete_topology, ring_topology
from src.models.transfer import TransferEntries, trace_power_log_partition
from src.thermo import LinearLevelFamily, Spectrum, ThermalStats, c_opt
from src.thermo.stats import validate_beta

logger = logging.getLogger(__name__)


# ===================== ИЗИНГ 1D =====================

@dataclass(frozen=True)
class IsingParams:
    """H = -h sum s_i - J sum s_i s_{i+1}, периодические граничные условия"""

    n_spins: int
    h: float
    j: float

    def __post_init__(self):
        if self.n_spins < 3:
            raise DomainError(f"кольцо Изинга требует N >= 3, получено {self.n_spins}")

    def to_dict(self) -> dict:
        return {"model": "ising_1d", "n_spins": self.n_spins, "h": self.h, "j": self.j}


def build_ising_1d(p: IsingParams) -> SpinHamiltonian:
    n = p.n_spins
    topology = ring_topology(n)
    return SpinHamiltonian(n, np.full(n, -float(p.h)), {e: -float(p.j) for e in topology}, topology)


def ising_1d_stats(h: float, j: float, n_spins: int, beta: float = 1.0) -> ThermalStats:
    """Трансфер-матрица T(s, s') = exp(beta (J s s' + h (s + s') / 2))"""
    if n_spins < 3:
        raise DomainError(f"кольцо Изинга требует N >= 3, получено {n_spins}")
    beta = validate_beta(beta)
    entries = TransferEntries(
        log_values=(beta * (j + h), -beta * j, beta * (j - h)),
        first=(j + h, -j, j - h),
        second=(0.0, 0.0, 0.0),
    )
    result = trace_power_log_partition(entries, n_spins)
    variance = max(result.d2_log_partition, 0.0)
    return ThermalStats(
        beta=beta,
        log_partition=result.log_partition,
        mean_energy=-result.d_log_partition,
        energy_variance=variance,
        heat_capacity=beta * beta * variance,
    )


def _ising_level_counts(n_spins: int):
    """(k, r, count): k спинов вверх образуют r доменов на кольце из N спинов"""
    n = n_spins
    levels = [(0, 0, 1), (n, 0, 1)]
    for k in range(1, n):
        for r in range(1, min(k, n - k) + 1):
            count = n * math.comb(k - 1, r - 1) * math.comb(n - k - 1, r - 1) // r
            levels.append((k, r, count))
    return levels


def ising_1d_spectrum(p: IsingParams) -> Spectrum:
    """Точный спектр: E = -h(2k - N) - J(N - 4r)"""
    n = p.n_spins
    energies, degeneracies = [], []
    for k, r, count in _ising_level_counts(n):
        energies.append(-p.h * (2 * k - n) - p.j * (n - 4 * r))
        degeneracies.append(count)
    return Spectrum.from_energies(energies, degeneracies)


def ising_family(n_spins: int) -> LinearLevelFamily:
    features: List[List[float]] = []
    log_deg: List[float] = []
    for k, r, count in _ising_level_counts(n_spins):
        features.append([-(2 * k - n_spins), -(n_spins - 4 * r)])
        log_deg.append(math.log(count))
    return LinearLevelFamily(("h", "j"), np.array(features, dtype=np.float64), np.array(log_deg))


# ===================== ALL-TO-ALL =====================

@dataclass(frozen=True)
class AllToAllParams:
    """H = -h sum s_i - J sum_{i<j} s_i s_j"""

    n_spins: int
    h: float
    j: float

    def __post_init__(self):
        if self.n_spins < 2:
            raise DomainError(f"модель all-to-all требует N >= 2, получено {self.n_spins}")

    def to_dict(self) -> dict:
        return {"model": "all_to_all", "n_spins": self.n_spins, "h": self.h, "j": self.j}


def build_all_to_all(p: AllToAllParams) -> SpinHamiltonian:
    n = p.n_spins
    topology = complete_topology(n)
    return SpinHamiltonian(n, np.full(n, -float(p.h)), {e: -float(p.j) for e in topology}, topology)


def _all_to_all_features(n_spins: int) -> np.ndarray:
    magnetization = 2 * np.arange(n_spins + 1) - n_spins
    return np.stack([-magnetization, -(magnetization ** 2 - n_spins) / 2.0], axis=1).astype(np.float64)


def all_to_all_spectrum(h: float, j: float, n_spins: int) -> Spectrum:
    """E_k = h(N - 2k) + (J/2)[4k(N - k) - N(N - 1)] кратности C(N, k), k - число спинов вверх"""
    if n_spins < 2:
        raise DomainError(f"модель all-to-all требует N >= 2, получено {n_spins}")
    energies = _all_to_all_features(n_spins) @ np.array([h, j], dtype=np.float64)
    degeneracies = [math.comb(n_spins, k) for k in range(n_spins + 1)]
    return Spectrum.from_energies(energies, degeneracies)


def all_to_all_family(n_spins: int) -> LinearLevelFamily:
    k = np.arange(n_spins + 1)
    log_deg = gammaln(n_spins + 1) - gammaln(k + 1) - gammaln(n_spins - k + 1)
    return LinearLevelFamily(("h", "j"), _all_to_all_features(n_spins), log_deg)


# ===================== K-SAT =====================

def ksat_reference_curve(n_spins: int) -> float:
    """Максимальная теплоёмкость эталонной модели k-SAT: c_opt(2^{N/2})"""
    if n_spins < 4 or n_spins % 2:
        raise DomainError(f"эталон k-SAT определён для чётных N >= 4, получено {n_spins}")
    return c_opt(2 ** (n_spins // 2))
