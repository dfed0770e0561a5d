"""
Пространства параметров оптимизации: прямое (маска топологии), ограниченное через tanh
и связанное (именованные параметры аналитического семейства)
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.enumeration import GrayCodeEnumerator
from src.exceptions import SpinThermoValidationError
from src.models import MAX_SPINS, SpinHamiltonian, TiedModel, tied_model
from src.models.hamiltonian import Edge, complete_topology
from src.optimizer.config import ExplicitInit, Init, UniformInit, WarmStart

logger = logging.getLogger(__name__)


class ParameterSpace(ABC):
    """Базовый класс: отображение theta -> (h, J) и точный градиент C по theta"""

    kind: str = "abstract"

    @property
    @abstractmethod
    def names(self) -> List[str]:
        pass

    @property
    def n_params(self) -> int:
        return len(self.names)

    @abstractmethod
    def evaluate(self, theta: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
        """
        Теплоёмкость и её градиент по theta

        Returns:
            Tuple[float, np.ndarray]: (C, dC/dtheta)
        """
        pass

    def heat_capacity(self, theta: Sequence[float], beta: float) -> float:
        return self.evaluate(np.asarray(theta, dtype=np.float64), beta)[0]

    @abstractmethod
    def render(self, theta: Sequence[float]) -> Optional[SpinHamiltonian]:
        """Явный гамильтониан для theta (None, если N вне предела перебора)"""
        pass

    def default_init(self) -> Init:
        return UniformInit(-1.0, 0.0)

    def initial_theta(self, init: Optional[Init], rng: np.random.Generator) -> np.ndarray:
        init = init if init is not None else self.default_init()
        if isinstance(init, UniformInit):
            return rng.uniform(init.lo, init.hi, self.n_params)
        if isinstance(init, (ExplicitInit, WarmStart)):
            theta = np.asarray(init.values, dtype=np.float64)
            if theta.shape != (self.n_params,):
                raise SpinThermoValidationError(
                    "init.values", f"ожидалось {self.n_params} значений, получено {theta.size}"
                )
            return theta.copy()
        raise SpinThermoValidationError("init", f"неизвестная инициализация {init!r}")

    def named(self, theta: Sequence[float]) -> Dict[str, float]:
        return dict(zip(self.names, (float(t) for t in theta)))

    def describe(self) -> dict:
        return {"kind": self.kind, "n_params": self.n_params}


class DirectSpace(ParameterSpace):
    """theta = все поля h_i и связи J_ij на рёбрах топологии"""

    kind = "direct"

    def __init__(self, n_spins: int, topology: Optional[Sequence[Edge]] = None, topology_name: str = "complete"):
        if n_spins > MAX_SPINS:
            raise SpinThermoValidationError("n_spins", f"прямое пространство ограничено {MAX_SPINS} спинами")
        self.n_spins = n_spins
        self.topology = frozenset(complete_topology(n_spins) if topology is None else topology)
        self.topology_name = topology_name
        self.template = SpinHamiltonian.zero(n_spins, self.topology)
        self.edges = self.template.edges()
        self.enumerator = GrayCodeEnumerator(n_spins, self.edges)

    @property
    def names(self) -> List[str]:
        return [f"h{i}" for i in range(self.n_spins)] + [f"J{i}_{j}" for i, j in self.edges]

    def hamiltonian_parameters(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=np.float64)

    def evaluate(self, theta: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
        params = self.hamiltonian_parameters(theta)
        accumulator = self.enumerator.moments(params[: self.n_spins], params[self.n_spins:], beta, with_gradient=True)
        return accumulator.stats().heat_capacity, accumulator.heat_capacity_gradient()

    def heat_capacity(self, theta: Sequence[float], beta: float) -> float:
        params = self.hamiltonian_parameters(np.asarray(theta, dtype=np.float64))
        return self.enumerator.moments(params[: self.n_spins], params[self.n_spins:], beta).stats().heat_capacity

    def render(self, theta: Sequence[float]) -> SpinHamiltonian:
        params = self.hamiltonian_parameters(np.asarray(theta, dtype=np.float64))
        return self.template.with_parameters(params[: self.n_spins], params[self.n_spins:])

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "n_spins": self.n_spins,
            "topology": self.topology_name,
            "n_edges": len(self.edges),
            "n_params": self.n_params,
        }


class BoundedSpace(DirectSpace):
    """h_i = c tanh x_i, J_ij = c tanh y_ij: любые theta дают |h|, |J| <= c"""

    kind = "tanh_bounded"

    def __init__(self, n_spins: int, bound_c: float, topology: Optional[Sequence[Edge]] = None,
                 topology_name: str = "complete"):
        super().__init__(n_spins, topology, topology_name)
        if not bound_c > 0:
            raise SpinThermoValidationError("bound_c", "должна быть положительной")
        self.bound_c = float(bound_c)

    def default_init(self) -> Init:
        return UniformInit(-1.5, 1.5)

    def hamiltonian_parameters(self, theta: np.ndarray) -> np.ndarray:
        return self.bound_c * np.tanh(theta)

    def evaluate(self, theta: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
        c, gradient = super().evaluate(theta, beta)
        t = np.tanh(theta)
        return c, gradient * self.bound_c * (1.0 - t * t)

    def describe(self) -> dict:
        payload = super().describe()
        payload["bound_c"] = self.bound_c
        return payload


# Начальные точки связанных семейств
def tied_default_values(name: str, n_spins: int) -> Tuple[float, ...]:
    if name == "star":
        return (2.0 * n_spins - 3.0, 2.2)
    if name == "star_constrained":
        return (6.0,)
    if name == "star_chain":
        return (3.5, 1.55, -1.6)
    if name == "ising":
        return (1.0, 0.5)
    return (0.4, 0.4)


class TiedSpace(ParameterSpace):
    """Связанные параметры аналитического семейства; градиент по семейству уровней"""

    kind = "tied"

    def __init__(self, model: TiedModel):
        self.model = model

    @classmethod
    def of(cls, name: str, n_spins: int, leaves_per_unit: int = 3, open_chain: bool = False) -> "TiedSpace":
        return cls(tied_model(name, n_spins, leaves_per_unit, open_chain))

    def __reduce__(self):
        # Семейство держит замыкания; в дочерний процесс передаются только аргументы
        m = self.model
        return (TiedSpace.of, (m.name, m.n_spins, m.leaves_per_unit, m.open_chain))

    @property
    def names(self) -> List[str]:
        return list(self.model.names)

    def default_init(self) -> Init:
        return ExplicitInit(tied_default_values(self.model.name, self.model.n_spins))

    def evaluate(self, theta: np.ndarray, beta: float) -> Tuple[float, np.ndarray]:
        stats, gradient = self.model.family.heat_capacity_gradient(theta, beta)
        return stats.heat_capacity, gradient

    def heat_capacity(self, theta: Sequence[float], beta: float) -> float:
        return self.model.family.stats(theta, beta).heat_capacity

    def render(self, theta: Sequence[float]) -> Optional[SpinHamiltonian]:
        if self.model.n_spins > MAX_SPINS:
            return None
        return self.model.render(theta)

    def named(self, theta: Sequence[float]) -> Dict[str, float]:
        return self.model.named(theta)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "model": self.model.name,
            "n_spins": self.model.n_spins,
            "params": self.names,
        }
