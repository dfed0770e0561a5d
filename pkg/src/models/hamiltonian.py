"""
Классический двухчастичный спиновый гамильтониан
H = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j над явной топологией связей
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import DomainError, SizeLimitError, SpinThermoValidationError

logger = logging.getLogger(__name__)

MAX_SPINS = 30

Edge = Tuple[int, int]
Topology = FrozenSet[Edge]


# ===================== ТОПОЛОГИИ =====================

def normalize_edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    if i == j:
        raise SpinThermoValidationError("couplings", f"самодействие спина {i} недопустимо")
    return (i, j) if i < j else (j, i)


def complete_topology(n_spins: int) -> Topology:
    return frozenset((i, j) for i in range(n_spins) for j in range(i + 1, n_spins))


def ring_topology(n_spins: int) -> Topology:
    if n_spins < 2:
        return frozenset()
    return frozenset(normalize_edge(i, (i + 1) % n_spins) for i in range(n_spins))


def path_topology(n_spins: int) -> Topology:
    return frozenset((i, i + 1) for i in range(n_spins - 1))


def star_topology(n_spins: int, hub: int = 0) -> Topology:
    return frozenset(normalize_edge(hub, i) for i in range(n_spins) if i != hub)


# ===================== ГАМИЛЬТОНИАН =====================

@dataclass(frozen=True, eq=False)
class SpinHamiltonian:
    """N спинов с полями h_i и связями J_ij (i < j) на рёбрах топологии"""

    n_spins: int
    fields: np.ndarray
    couplings: Mapping[Edge, float]
    topology: Topology

    def __post_init__(self):
        n = self.n_spins
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise SpinThermoValidationError("n_spins", f"ожидалось целое, получено {n!r}")
        n = int(n)
        if n < 1:
            raise DomainError(f"число спинов должно быть >= 1, получено {n}")
        if n > MAX_SPINS:
            raise SizeLimitError(f"число спинов {n} превышает предел {MAX_SPINS}")

        fields = np.array(self.fields, dtype=np.float64).reshape(-1)
        if fields.shape != (n,):
            raise SpinThermoValidationError("fields", f"ожидалось {n} полей, получено {fields.size}")
        if not np.all(np.isfinite(fields)):
            raise SpinThermoValidationError("fields", "нефинитные значения полей")
        fields.setflags(write=False)

        topology = frozenset(normalize_edge(i, j) for i, j in self.topology)
        for i, j in topology:
            if j >= n:
                raise SpinThermoValidationError("topology", f"ребро ({i}, {j}) вне диапазона спинов")

        couplings: Dict[Edge, float] = {}
        for key, value in self.couplings.items():
            i, j = key
            if int(i) >= int(j):
                raise SpinThermoValidationError("couplings", f"ключ ({i}, {j}) должен иметь i < j")
            edge = (int(i), int(j))
            value = float(value)
            if not math.isfinite(value):
                raise SpinThermoValidationError("couplings", f"нефинитная связь на ребре {edge}")
            if value != 0.0 and edge not in topology:
                raise SpinThermoValidationError("couplings", f"связь {edge} вне топологии")
            couplings[edge] = value

        object.__setattr__(self, "n_spins", n)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "couplings", dict(sorted(couplings.items())))
        object.__setattr__(self, "topology", topology)

    @classmethod
    def build(
        cls,
        n_spins: int,
        fields: Sequence[float],
        couplings: Optional[Mapping[Edge, float]] = None,
        topology: Optional[Iterable[Edge]] = None,
    ) -> "SpinHamiltonian":
        """Конструктор с нормализацией ключей; топология по умолчанию - полный граф"""
        normalized: Dict[Edge, float] = {}
        for (i, j), value in (couplings or {}).items():
            edge = normalize_edge(i, j)
            normalized[edge] = normalized.get(edge, 0.0) + float(value)
        topo = complete_topology(n_spins) if topology is None else frozenset(normalize_edge(i, j) for i, j in topology)
        return cls(n_spins, np.asarray(fields, dtype=np.float64), normalized, topo)

    @classmethod
    def zero(cls, n_spins: int, topology: Optional[Iterable[Edge]] = None) -> "SpinHamiltonian":
        return cls.build(n_spins, np.zeros(n_spins), {}, topology)

    # ===================== ДОСТУП =====================

    def edges(self) -> List[Edge]:
        """Рёбра топологии в каноническом порядке"""
        return sorted(self.topology)

    def coupling(self, i: int, j: int) -> float:
        return self.couplings.get(normalize_edge(i, j), 0.0)

    def coupling_vector(self, edges: Optional[Sequence[Edge]] = None) -> np.ndarray:
        edges = self.edges() if edges is None else edges
        return np.array([self.couplings.get(e, 0.0) for e in edges], dtype=np.float64)

    def active_edges(self) -> List[Edge]:
        return [e for e, v in self.couplings.items() if v != 0.0]

    def with_parameters(self, fields: Sequence[float], coupling_values: Sequence[float]) -> "SpinHamiltonian":
        """Тот же каркас, новые параметры; coupling_values идут в порядке edges()"""
        edges = self.edges()
        if len(coupling_values) != len(edges):
            raise SpinThermoValidationError("couplings", "длина вектора связей не совпадает с числом рёбер")
        return SpinHamiltonian(
            self.n_spins,
            np.asarray(fields, dtype=np.float64),
            {e: float(v) for e, v in zip(edges, coupling_values)},
            self.topology,
        )

    def energy(self, spins: Sequence[float]) -> float:
        """Энергия конфигурации (массив +-1)"""
        s = np.asarray(spins, dtype=np.float64)
        total = float(np.dot(self.fields, s))
        for (i, j), value in self.couplings.items():
            total += value * s[i] * s[j]
        return total

    def energy_of_bits(self, code: int) -> float:
        """Энергия конфигурации, закодированной целым: бит i установлен <=> s_i = +1"""
        spins = [1.0 if (code >> i) & 1 else -1.0 for i in range(self.n_spins)]
        return self.energy(spins)

    def max_abs_parameter(self) -> float:
        values = [abs(v) for v in self.couplings.values()] + list(np.abs(self.fields))
        return max(values) if values else 0.0

    def to_dict(self) -> dict:
        return {
            "model": "generic",
            "n_spins": self.n_spins,
            "h": self.fields.tolist(),
            "J": [[i, j, v] for (i, j), v in self.couplings.items() if v != 0.0],
            "topology": [[i, j] for i, j in self.edges()],
        }


# ===================== КАЛИБРОВОЧНЫЕ ПРЕОБРАЗОВАНИЯ =====================

def gauge_flip(hm: SpinHamiltonian, spin: int) -> SpinHamiltonian:
    """s_i -> -s_i: меняет знак h_i и всех связей спина i, спектр не меняется"""
    if not 0 <= spin < hm.n_spins:
        raise DomainError(f"спин {spin} вне диапазона")
    fields = hm.fields.copy()
    fields[spin] = -fields[spin]
    couplings = {e: (-v if spin in e else v) for e, v in hm.couplings.items()}
    return SpinHamiltonian(hm.n_spins, fields, couplings, hm.topology)


def gauge_normalize(hm: SpinHamiltonian) -> Tuple[SpinHamiltonian, List[int]]:
    """Переворот всех спинов с отрицательным полем; возвращает новый гамильтониан и список перевёрнутых"""
    flipped = [i for i in range(hm.n_spins) if hm.fields[i] < 0]
    if not flipped:
        return hm, []
    signs = np.ones(hm.n_spins)
    signs[flipped] = -1.0
    couplings = {(i, j): v * signs[i] * signs[j] for (i, j), v in hm.couplings.items()}
    return SpinHamiltonian(hm.n_spins, hm.fields * signs, couplings, hm.topology), flipped
