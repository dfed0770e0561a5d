"""
Модель Star: центральный спин с полем a, равномерно связанный (b) со всеми остальными

H = a s_1 + b sum_{i>=2} s_i (1 + s_1)
При s_1 = -1 листья свободны: уровень -a кратности 2^{N-1}.
При s_1 = +1 листья видят поле 2b: уровни a + 2b(2k - (N-1)) кратности C(N-1, k).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from src.exceptions import DomainError
from src.models.hamiltonian import SpinHamiltonian, star_topology
from src.models.transfer import log_cosh, sech_squared
from src.thermo import Spectrum, ThermalStats
from src.thermo.stats import validate_beta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StarParams:
    n_spins: int
    a: float
    b: float

    def __post_init__(self):
        if self.n_spins < 2:
            raise DomainError(f"модель Star требует N >= 2, получено {self.n_spins}")

    def to_dict(self) -> dict:
        return {"model": "star", "n_spins": self.n_spins, "a": self.a, "b": self.b}


def build_star(p: StarParams) -> SpinHamiltonian:
    n = p.n_spins
    fields = np.full(n, float(p.b))
    fields[0] = p.a
    couplings = {(0, i): float(p.b) for i in range(1, n)}
    return SpinHamiltonian(n, fields, couplings, star_topology(n))


def build_star_bar(p: StarParams) -> SpinHamiltonian:
    """
    Вариант с двумя центральными спинами: поля b на спинах 1 и 2, связь a между ними,
    связи b от каждого из них ко всем остальным. Спектр совпадает с Star(a, b).
    """
    n = p.n_spins
    if n < 3:
        raise DomainError("вариант с двумя центрами требует N >= 3")
    fields = np.zeros(n)
    fields[0] = fields[1] = p.b
    couplings = {(0, 1): float(p.a)}
    for i in range(2, n):
        couplings[(0, i)] = float(p.b)
        couplings[(1, i)] = float(p.b)
    topology = frozenset(couplings)
    return SpinHamiltonian(n, fields, couplings, topology)


def star_spectrum(p: StarParams) -> Spectrum:
    leaves = p.n_spins - 1
    energies = [p.a + 2.0 * p.b * (2 * k - leaves) for k in range(leaves + 1)]
    degeneracies = [math.comb(leaves, k) for k in range(leaves + 1)]
    energies.append(-p.a)
    degeneracies.append(2 ** leaves)
    return Spectrum.from_energies(energies, degeneracies)


def _star_branches(p: StarParams, beta: float):
    """Логарифмы двух ветвей Z/2^{N-1} и их производные по beta"""
    leaves = p.n_spins - 1
    x = 2.0 * beta * p.b
    u = -beta * p.a + leaves * log_cosh(x)
    u1 = -p.a + 2.0 * p.b * leaves * math.tanh(x)
    u2 = 4.0 * p.b * p.b * leaves * sech_squared(x)
    v = beta * p.a
    v1 = p.a
    return u, u1, u2, v, v1


def star_log_z(p: StarParams, beta: float = 1.0) -> float:
    """ln Z = (N-1) ln 2 + ln(e^{-beta a} cosh(2 beta b)^{N-1} + e^{beta a})"""
    beta = validate_beta(beta)
    u, _, _, v, _ = _star_branches(p, beta)
    return (p.n_spins - 1) * math.log(2.0) + float(np.logaddexp(u, v))


def star_stats(p: StarParams, beta: float = 1.0) -> ThermalStats:
    beta = validate_beta(beta)
    u, u1, u2, v, v1 = _star_branches(p, beta)
    weight = float(expit(u - v))
    d_log = weight * u1 + (1.0 - weight) * v1
    variance = weight * u2 + weight * (1.0 - weight) * (u1 - v1) ** 2
    return ThermalStats(
        beta=beta,
        log_partition=(p.n_spins - 1) * math.log(2.0) + float(np.logaddexp(u, v)),
        mean_energy=-d_log,
        energy_variance=variance,
        heat_capacity=beta * beta * variance,
    )


def star_heat_capacity(p: StarParams, beta: float = 1.0) -> float:
    return star_stats(p, beta).heat_capacity
