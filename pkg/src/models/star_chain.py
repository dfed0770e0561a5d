"""
Модель Star-chain: n центральных спинов в кольце (связь J), у каждого m листьев

H = a sum_a s_a + J sum_a s_a s_{a+1} + b sum_{a,i} (s_a + 1) s_{a,i}
Центральные спины нумеруются первыми, листья сгруппированы по центрам.
Для вложения в двудольные топологии поддерживается открытая цепочка центров.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from src.exceptions import DomainError, SizeLimitError
from src.models.hamiltonian import Edge, SpinHamiltonian, normalize_edge
from src.models.transfer import TransferEntries, log_cosh, sech_squared, trace_power_log_partition
from src.thermo import LinearLevelFamily, Spectrum, ThermalStats
from src.thermo.stats import validate_beta

logger = logging.getLogger(__name__)

MAX_HUB_ENUMERATION = 20


@dataclass(frozen=True)
class StarChainParams:
    n_units: int
    leaves_per_unit: int
    a: float
    b: float
    j: float
    open_chain: bool = False

    def __post_init__(self):
        if self.n_units < 1:
            raise DomainError(f"число центров n должно быть >= 1, получено {self.n_units}")
        if self.leaves_per_unit < 1:
            raise DomainError(f"число листьев m должно быть >= 1, получено {self.leaves_per_unit}")

    @property
    def n_spins(self) -> int:
        return self.n_units * (self.leaves_per_unit + 1)

    @property
    def hub_path(self) -> bool:
        """Центры образуют путь: открытая цепочка или кольцо из двух центров с одним ребром"""
        return self.open_chain or self.n_units == 2

    def hub_edges(self) -> Dict[Edge, float]:
        """Связи между центрами; при n = 1 членов нет, при n = 2 кольцо вырождается в одно ребро J"""
        n = self.n_units
        if n == 1:
            return {}
        if self.hub_path:
            return {(k, k + 1): float(self.j) for k in range(n - 1)}
        return {normalize_edge(k, (k + 1) % n): float(self.j) for k in range(n)}

    def leaf_index(self, hub: int, leaf: int) -> int:
        return self.n_units + hub * self.leaves_per_unit + leaf

    def to_dict(self) -> dict:
        return {
            "model": "star_chain",
            "n_units": self.n_units,
            "leaves_per_unit": self.leaves_per_unit,
            "a": self.a,
            "b": self.b,
            "j": self.j,
            "open_chain": self.open_chain,
        }


def build_star_chain(p: StarChainParams) -> SpinHamiltonian:
    n, m = p.n_units, p.leaves_per_unit
    fields = np.full(p.n_spins, float(p.b))
    fields[:n] = p.a
    couplings = dict(p.hub_edges())
    for hub in range(n):
        for leaf in range(m):
            couplings[(hub, p.leaf_index(hub, leaf))] = float(p.b)
    return SpinHamiltonian(p.n_spins, fields, couplings, frozenset(couplings))


# ===================== ТРАНСФЕР-МАТРИЦА =====================

def _ring_entries(p: StarChainParams, beta: float) -> TransferEntries:
    """Симметризованная трансфер-матрица кольца (J отбрасывается при n = 1)"""
    m = p.leaves_per_unit
    a, b = p.a, p.b
    j = 0.0 if p.n_units == 1 else p.j
    x = 2.0 * beta * b
    lc, th, s2 = log_cosh(x), math.tanh(x), sech_squared(x)
    ln2 = math.log(2.0)
    return TransferEntries(
        log_values=(
            -beta * a - beta * j + m * (ln2 + lc),
            beta * j + m * ln2 + 0.5 * m * lc,
            beta * a - beta * j + m * ln2,
        ),
        first=(
            -a - j + 2.0 * m * b * th,
            j + m * b * th,
            a - j,
        ),
        second=(
            4.0 * m * b * b * s2,
            2.0 * m * b * b * s2,
            0.0,
        ),
    )


def star_chain_eigenvalues(p: StarChainParams, beta: float = 1.0) -> Tuple[float, float]:
    """
    Собственные значения lambda_+, lambda_- трансфер-матрицы кольца в замкнутой форме

    lambda = 2^{m-1}/(A C) (C^2 (A^2 + B^m) +- sqrt(4 A^2 B^m + C^4 (A^2 - B^m)^2)),
    A = e^{beta a}, B = cosh(2 beta b), C = e^{-beta J}.
    """
    beta = validate_beta(beta)
    m = p.leaves_per_unit
    A = math.exp(beta * p.a)
    B = math.cosh(2.0 * beta * p.b)
    C = math.exp(-beta * p.j)
    root = math.sqrt(4.0 * A * A * B ** m + C ** 4 * (A * A - B ** m) ** 2)
    prefactor = 2.0 ** (m - 1) / (A * C)
    base = C * C * (A * A + B ** m)
    return prefactor * (base + root), prefactor * (base - root)


def _open_chain_log_z(p: StarChainParams, beta: float) -> float:
    """ln(q^T S^{n-1} q) для открытой цепочки, в логарифмической шкале"""
    m = p.leaves_per_unit
    ln2 = math.log(2.0)
    log_site = np.array([-beta * p.a + m * (ln2 + log_cosh(2.0 * beta * p.b)), beta * p.a + m * ln2])
    log_bond = np.array([[-beta * p.j, beta * p.j], [beta * p.j, -beta * p.j]])
    log_vec = log_site.copy()
    for _ in range(p.n_units - 1):
        log_vec = logsumexp(log_vec[:, None] + log_bond, axis=0) + log_site
    return float(logsumexp(log_vec))


def star_chain_log_z(p: StarChainParams, beta: float = 1.0) -> float:
    beta = validate_beta(beta)
    if p.hub_path:
        return _open_chain_log_z(p, beta)
    return trace_power_log_partition(_ring_entries(p, beta), p.n_units).log_partition


def star_chain_stats(p: StarChainParams, beta: float = 1.0) -> ThermalStats:
    """Статистика кольца по трансфер-матрице; путь центров - через семейство уровней"""
    beta = validate_beta(beta)
    if p.hub_path:
        family = star_chain_family(p.n_units, p.leaves_per_unit, open_chain=True)
        return family.stats([p.a, p.b, p.j], beta)
    result = trace_power_log_partition(_ring_entries(p, beta), p.n_units)
    variance = max(result.d2_log_partition, 0.0)
    return ThermalStats(
        beta=beta,
        log_partition=result.log_partition,
        mean_energy=-result.d_log_partition,
        energy_variance=variance,
        heat_capacity=beta * beta * variance,
    )


def star_chain_heat_capacity(p: StarChainParams, beta: float = 1.0) -> float:
    return star_chain_stats(p, beta).heat_capacity


# ===================== СПЕКТР =====================

def hub_configuration_groups(n_units: int, open_chain: bool = False) -> List[Tuple[int, int, int]]:
    """
    Группы конфигураций центров: (n_up, I, count), где I - сумма s_a s_{a+1} по рёбрам центров
    (для n = 2 кольцо совпадает с путём и даёт s_1 s_2, для n = 1 член отсутствует)
    """
    if n_units > MAX_HUB_ENUMERATION:
        raise SizeLimitError(f"перебор 2^{n_units} конфигураций центров превышает предел 2^{MAX_HUB_ENUMERATION}")
    codes = np.arange(2 ** n_units, dtype=np.int64)
    n_up = np.zeros(codes.size, dtype=np.int64)
    interaction = np.zeros(codes.size, dtype=np.int64)
    first = 2 * (codes & 1) - 1
    previous = first
    for k in range(n_units):
        spin = 2 * ((codes >> k) & 1) - 1
        n_up += spin > 0
        if k > 0:
            interaction += previous * spin
        previous = spin
    if n_units >= 3 and not open_chain:
        # замыкание кольца
        interaction += previous * first
    keys, counts = np.unique(np.stack([n_up, interaction], axis=1), axis=0, return_counts=True)
    return [(int(k[0]), int(k[1]), int(c)) for k, c in zip(keys, counts)]


def star_chain_spectrum(p: StarChainParams) -> Spectrum:
    n, m = p.n_units, p.leaves_per_unit
    energies: List[float] = []
    degeneracies: List[int] = []
    for n_up, interaction, count in hub_configuration_groups(n, p.open_chain):
        free = 2 ** ((n - n_up) * m)
        for mu in range(m * n_up + 1):
            energies.append(p.j * interaction + p.a * (2 * n_up - n) + 2.0 * p.b * (2 * mu - m * n_up))
            degeneracies.append(count * free * math.comb(m * n_up, mu))
    return Spectrum.from_energies(energies, degeneracies)


def star_chain_family(n_units: int, leaves_per_unit: int, open_chain: bool = False) -> LinearLevelFamily:
    """Уровни, линейные по (a, b, J), с логарифмами кратностей"""
    n, m = n_units, leaves_per_unit
    features: List[List[float]] = []
    log_deg: List[float] = []
    ln2 = math.log(2.0)
    for n_up, interaction, count in hub_configuration_groups(n, open_chain):
        mus = np.arange(m * n_up + 1)
        binomial = gammaln(m * n_up + 1) - gammaln(mus + 1) - gammaln(m * n_up - mus + 1)
        for mu, log_binom in zip(mus, binomial):
            features.append([2 * n_up - n, 2 * (2 * int(mu) - m * n_up), interaction])
            log_deg.append(math.log(count) + (n - n_up) * m * ln2 + float(log_binom))
    return LinearLevelFamily(("a", "b", "j"), np.array(features, dtype=np.float64), np.array(log_deg))
