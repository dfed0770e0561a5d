"""
Семейства уровней, линейных по небольшому числу именованных параметров

Энергия уровня l равна features[l] @ theta + offsets[l], кратность задаётся логарифмом.
Так описываются все модели со связанными параметрами (Star, Star-chain, Ising, all-to-all),
поэтому теплоёмкость и её точный градиент считаются при любом N без перебора 2^N состояний.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.thermo.stats import ThermalStats, stats_from_log_weights, validate_beta

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinearLevelFamily:
    names: Tuple[str, ...]
    features: np.ndarray
    log_degeneracies: np.ndarray
    offsets: Optional[np.ndarray] = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != len(self.names):
            raise ValueError("features должна иметь форму (уровни, параметры)")
        log_deg = np.asarray(self.log_degeneracies, dtype=np.float64)
        if log_deg.shape != (features.shape[0],):
            raise ValueError("log_degeneracies не согласована с features")
        offsets = np.zeros(features.shape[0]) if self.offsets is None else np.asarray(self.offsets, dtype=np.float64)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "log_degeneracies", log_deg)
        object.__setattr__(self, "offsets", offsets)

    @property
    def n_params(self) -> int:
        return len(self.names)

    def energies(self, theta: Sequence[float]) -> np.ndarray:
        return self.features @ np.asarray(theta, dtype=np.float64) + self.offsets

    def stats(self, theta: Sequence[float], beta: float = 1.0) -> ThermalStats:
        beta = validate_beta(beta)
        energies = self.energies(theta)
        return stats_from_log_weights(energies, self.log_degeneracies - beta * energies, beta)

    def heat_capacity_gradient(self, theta: Sequence[float], beta: float = 1.0) -> Tuple[ThermalStats, np.ndarray]:
        """
        Статистика и dC/dtheta_k = beta^2 [2 Cov(E, f_k) - beta Cov((E - <E>)^2, f_k)],
        где f_k = dE/dtheta_k - столбец features
        """
        stats = self.stats(theta, beta)
        energies = self.energies(theta)
        log_w = self.log_degeneracies - stats.beta * energies
        p = np.exp(log_w - stats.log_partition)
        centered = energies - stats.mean_energy
        cov_linear = (p * centered) @ self.features
        cov_square = (p * (centered * centered - stats.energy_variance)) @ self.features
        gradient = stats.beta ** 2 * (2.0 * cov_linear - stats.beta * cov_square)
        return stats, gradient
