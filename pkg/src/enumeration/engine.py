"""
Точный перебор: термодинамика, градиент теплоёмкости и спектр произвольного гамильтониана
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numba
import numpy as np

from src.enumeration import kernels
from src.exceptions import SizeLimitError
from src.models.hamiltonian import MAX_SPINS, Edge, SpinHamiltonian
from src.thermo import Spectrum, ThermalStats, gibbs_populations
from src.thermo.stats import validate_beta

logger = logging.getLogger(__name__)

MAX_SPECTRUM_SPINS = 26
# Разбиение тура фиксировано и не зависит от числа потоков
MAX_SEGMENT_BITS = 6
SERIAL_SPINS = 10


def segment_bits(n_spins: int) -> int:
    return min(max(n_spins - SERIAL_SPINS, 0), MAX_SEGMENT_BITS)


def configure_threads(threads: Optional[int]) -> int:
    """Число потоков numba, ограниченное размером пула"""
    if threads is None:
        return numba.get_num_threads()
    threads = max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)
    return threads


@dataclass(frozen=True)
class GradientRecord:
    """dC/dh_i и dC/dJ_ij при фиксированной beta"""

    d_c_d_field: np.ndarray
    d_c_d_coupling: Dict[Edge, float]

    def as_vector(self, edges: Sequence[Edge]) -> np.ndarray:
        return np.concatenate([self.d_c_d_field, [self.d_c_d_coupling[e] for e in edges]])

    def norm(self) -> float:
        return float(np.linalg.norm(np.concatenate([self.d_c_d_field, list(self.d_c_d_coupling.values())])))


@dataclass(frozen=True, eq=False)
class MomentAccumulator:
    """
    Суммы sum w e^k (k = 0..3) и sum w e^r f_k (r = 0..2) с общим множителем exp(-beta * ref),
    e = E - shift
    """

    beta: float
    shift: float
    ref: float
    sums: np.ndarray
    parameter_sums: Optional[np.ndarray]
    final_energy: float

    def _raw_moments(self) -> Tuple[float, float, float]:
        s0 = self.sums[0]
        return self.sums[1] / s0, self.sums[2] / s0, self.sums[3] / s0

    def stats(self) -> ThermalStats:
        m1, m2, m3 = self._raw_moments()
        variance = max(m2 - m1 * m1, 0.0)
        third = m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3
        return ThermalStats(
            beta=self.beta,
            log_partition=math.log(self.sums[0]) - self.beta * self.ref,
            mean_energy=self.shift + m1,
            energy_variance=variance,
            heat_capacity=self.beta ** 2 * variance,
            third_central_moment=third,
        )

    def heat_capacity_gradient(self) -> np.ndarray:
        """dC/dtheta_k = beta^2 [2 Cov(E, f_k) - beta Cov((E - <E>)^2, f_k)]"""
        if self.parameter_sums is None:
            raise ValueError("градиентные суммы не накапливались")
        m1, m2, _ = self._raw_moments()
        variance = m2 - m1 * m1
        f0, f1, f2 = self.parameter_sums / self.sums[0]
        cov_linear = f1 - m1 * f0
        cov_square = f2 - 2.0 * m1 * f1 + m1 * m1 * f0 - variance * f0
        return self.beta ** 2 * (2.0 * cov_linear - self.beta * cov_square)


class GrayCodeEnumerator:
    """Подготовленный обход для фиксированной топологии; параметры меняются между вызовами"""

    def __init__(self, n_spins: int, edges: Sequence[Edge]):
        if n_spins > MAX_SPINS:
            raise SizeLimitError(f"перебор ограничен {MAX_SPINS} спинами, получено {n_spins}")
        self.n_spins = int(n_spins)
        self.edges: List[Edge] = [tuple(e) for e in edges]
        self.edge_i = np.array([e[0] for e in self.edges], dtype=np.int64)
        self.edge_j = np.array([e[1] for e in self.edges], dtype=np.int64)

        # CSR-список соседей; nbr_edge хранит номер ребра для подстановки значений J
        neighbours: List[List[Tuple[int, int]]] = [[] for _ in range(self.n_spins)]
        for k, (i, j) in enumerate(self.edges):
            neighbours[i].append((j, k))
            neighbours[j].append((i, k))
        self.nbr_ptr = np.zeros(self.n_spins + 1, dtype=np.int64)
        self.nbr_ptr[1:] = np.cumsum([len(row) for row in neighbours])
        self.nbr_idx = np.array([j for row in neighbours for j, _ in row], dtype=np.int64)
        self.nbr_edge = np.array([k for row in neighbours for _, k in row], dtype=np.int64)

        self.n_segments = 2 ** segment_bits(self.n_spins)
        self.segment_length = np.int64(2 ** self.n_spins // self.n_segments)

    @classmethod
    def for_hamiltonian(cls, hm: SpinHamiltonian) -> "GrayCodeEnumerator":
        return cls(hm.n_spins, hm.edges())

    @property
    def n_params(self) -> int:
        return self.n_spins + len(self.edges)

    def _arrays(self, fields, coupling_values):
        fields = np.ascontiguousarray(fields, dtype=np.float64)
        edge_v = np.ascontiguousarray(coupling_values, dtype=np.float64)
        nbr_val = edge_v[self.nbr_edge] if edge_v.size else np.zeros(0)
        return fields, edge_v, nbr_val

    def moments(self, fields, coupling_values, beta: float = 1.0, with_gradient: bool = False) -> MomentAccumulator:
        beta = validate_beta(beta)
        fields, edge_v, nbr_val = self._arrays(fields, coupling_values)
        spins0 = -np.ones(self.n_spins)
        shift = float(kernels.configuration_energy(fields, self.edge_i, self.edge_j, edge_v, spins0))
        width = self.n_params if with_gradient else 0
        moments = np.zeros((self.n_segments, 6))
        gradient = np.zeros((self.n_segments, 3, width))

        if self.n_segments == 1:
            kernels.segment_moments(
                fields, self.edge_i, self.edge_j, edge_v, self.nbr_ptr, self.nbr_idx, nbr_val,
                np.int64(0), self.segment_length, beta, shift, with_gradient, moments[0], gradient[0],
            )
        else:
            kernels.tour_moments(
                fields, self.edge_i, self.edge_j, edge_v, self.nbr_ptr, self.nbr_idx, nbr_val,
                self.segment_length, beta, shift, with_gradient, moments, gradient,
            )

        # Слияние в фиксированном порядке отрезков
        ref = float(moments[:, 0].min())
        factors = np.exp(-beta * (moments[:, 0] - ref))
        sums = factors @ moments[:, 1:5]
        parameter_sums = np.tensordot(factors, gradient, axes=1) if with_gradient else None
        return MomentAccumulator(
            beta=beta,
            shift=shift,
            ref=ref,
            sums=sums,
            parameter_sums=parameter_sums,
            final_energy=float(moments[-1, 5]),
        )

    def energies(self, fields, coupling_values) -> np.ndarray:
        """Энергии всех 2^N конфигураций в порядке тура"""
        if self.n_spins > MAX_SPECTRUM_SPINS:
            raise SizeLimitError(f"полный спектр ограничен {MAX_SPECTRUM_SPINS} спинами, получено {self.n_spins}")
        fields, edge_v, nbr_val = self._arrays(fields, coupling_values)
        out = np.empty(2 ** self.n_spins)
        kernels.tour_energies(
            fields, self.edge_i, self.edge_j, edge_v, self.nbr_ptr, self.nbr_idx, nbr_val,
            np.int64(self.n_segments), self.segment_length, out,
        )
        return out


# ===================== ОПЕРАЦИИ =====================

def _accumulate(hm: SpinHamiltonian, beta: float, with_gradient: bool, threads: Optional[int]) -> MomentAccumulator:
    configure_threads(threads)
    enumerator = GrayCodeEnumerator.for_hamiltonian(hm)
    return enumerator.moments(hm.fields, hm.coupling_vector(enumerator.edges), beta, with_gradient)


def enumerate_stats(hm: SpinHamiltonian, beta: float = 1.0, threads: Optional[int] = None) -> ThermalStats:
    """Точные ln Z, <E>, Var(E), C перебором всех 2^N конфигураций"""
    return _accumulate(hm, beta, False, threads).stats()


def enumerate_gradient(
    hm: SpinHamiltonian, beta: float = 1.0, threads: Optional[int] = None
) -> Tuple[ThermalStats, GradientRecord]:
    """Статистика и точный градиент C по всем полям и всем рёбрам топологии"""
    accumulator = _accumulate(hm, beta, True, threads)
    gradient = accumulator.heat_capacity_gradient()
    n = hm.n_spins
    record = GradientRecord(
        d_c_d_field=gradient[:n],
        d_c_d_coupling={e: float(g) for e, g in zip(hm.edges(), gradient[n:])},
    )
    return accumulator.stats(), record


def enumerate_spectrum(hm: SpinHamiltonian, threads: Optional[int] = None) -> Spectrum:
    """Точный спектр со слиянием уровней; основное состояние в 0"""
    if hm.n_spins > MAX_SPECTRUM_SPINS:
        raise SizeLimitError(f"полный спектр ограничен {MAX_SPECTRUM_SPINS} спинами, получено {hm.n_spins}")
    configure_threads(threads)
    enumerator = GrayCodeEnumerator.for_hamiltonian(hm)
    energies = enumerator.energies(hm.fields, hm.coupling_vector(enumerator.edges))
    energies -= energies.min()
    return Spectrum.from_energies(energies)


def level_statistics(hm: SpinHamiltonian, beta: float = 1.0) -> Tuple[float, float, float]:
    """Вес основного уровня, первого возбуждённого и всех остальных"""
    populations = [p for _, p in gibbs_populations(enumerate_spectrum(hm), beta)]
    ground = populations[0]
    first = populations[1] if len(populations) > 1 else 0.0
    tail = float(sum(populations[2:]))
    return ground, first, tail


def gray_tour_final_energy(hm: SpinHamiltonian) -> Tuple[float, float]:
    """(накопленная энергия в конце тура, энергия последней конфигурации напрямую)"""
    enumerator = GrayCodeEnumerator.for_hamiltonian(hm)
    accumulator = enumerator.moments(hm.fields, hm.coupling_vector(enumerator.edges), 1.0)
    last = 2 ** hm.n_spins - 1
    return accumulator.final_energy, hm.energy_of_bits(last ^ (last >> 1))
