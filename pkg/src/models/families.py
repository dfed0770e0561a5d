"""
Семейства со связанными параметрами: уровни, линейные по именованным параметрам,
и отрисовка параметров в явный гамильтониан
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from src.exceptions import DomainError
from src.models.hamiltonian import SpinHamiltonian
from src.models.ising import AllToAllParams, IsingParams, all_to_all_family, build_all_to_all, build_ising_1d, ising_family
from src.models.star import StarParams, build_star
from src.models.star_chain import StarChainParams, build_star_chain, star_chain_family
from src.thermo import LinearLevelFamily

logger = logging.getLogger(__name__)

TIED_MODELS = ("star", "star_constrained", "star_chain", "ising", "all_to_all")


def star_family(n_spins: int) -> LinearLevelFamily:
    """Star со свободными (a, b)"""
    leaves = n_spins - 1
    k = np.arange(leaves + 1)
    binomial = gammaln(leaves + 1) - gammaln(k + 1) - gammaln(leaves - k + 1)
    features = np.concatenate([
        np.stack([np.ones(leaves + 1), 2.0 * (2 * k - leaves)], axis=1),
        [[-1.0, 0.0]],
    ])
    log_deg = np.append(binomial, leaves * math.log(2.0))
    return LinearLevelFamily(("a", "b"), features, log_deg)


def star_constrained_family(n_spins: int) -> LinearLevelFamily:
    """Star со связью a = b (N - 3): единственный параметр b"""
    base = star_family(n_spins)
    tied = base.features[:, 1] + (n_spins - 3) * base.features[:, 0]
    return LinearLevelFamily(("b",), tied[:, None], base.log_degeneracies)


@dataclass(frozen=True)
class TiedModel:
    """Семейство уровней плюс отрисовка theta -> параметры модели"""

    name: str
    n_spins: int
    family: LinearLevelFamily
    to_params: Callable[[Sequence[float]], object]
    render_fn: Optional[Callable[[object], SpinHamiltonian]]
    leaves_per_unit: int = 3
    open_chain: bool = False

    @property
    def names(self) -> Tuple[str, ...]:
        return self.family.names

    def params(self, theta: Sequence[float]):
        return self.to_params([float(t) for t in theta])

    def render(self, theta: Sequence[float]) -> SpinHamiltonian:
        if self.render_fn is None:
            raise DomainError(f"семейство {self.name} не имеет явного гамильтониана")
        return self.render_fn(self.params(theta))

    def named(self, theta: Sequence[float]) -> Dict[str, float]:
        values = dict(zip(self.names, (float(t) for t in theta)))
        if self.name == "star_constrained":
            values["a"] = values["b"] * (self.n_spins - 3)
        return values


def tied_model(name: str, n_spins: int, leaves_per_unit: int = 3, open_chain: bool = False) -> TiedModel:
    """Семейство по имени; для star_chain n_spins должно делиться на m + 1"""
    if name == "star":
        return TiedModel(name, n_spins, star_family(n_spins),
                         lambda t: StarParams(n_spins, t[0], t[1]), build_star)
    if name == "star_constrained":
        if n_spins < 2:
            raise DomainError("модель Star требует N >= 2")
        return TiedModel(name, n_spins, star_constrained_family(n_spins),
                         lambda t: StarParams(n_spins, t[0] * (n_spins - 3), t[0]), build_star)
    if name == "star_chain":
        if n_spins % (leaves_per_unit + 1):
            raise DomainError(f"N = {n_spins} не делится на m + 1 = {leaves_per_unit + 1}")
        n_units = n_spins // (leaves_per_unit + 1)
        return TiedModel(
            name, n_spins, star_chain_family(n_units, leaves_per_unit, open_chain),
            lambda t: StarChainParams(n_units, leaves_per_unit, t[0], t[1], t[2], open_chain),
            build_star_chain, leaves_per_unit, open_chain,
        )
    if name == "ising":
        return TiedModel(name, n_spins, ising_family(n_spins),
                         lambda t: IsingParams(n_spins, t[0], t[1]), build_ising_1d)
    if name == "all_to_all":
        return TiedModel(name, n_spins, all_to_all_family(n_spins),
                         lambda t: AllToAllParams(n_spins, t[0], t[1]), build_all_to_all)
    raise DomainError(f"неизвестное семейство {name!r}, доступны: {', '.join(TIED_MODELS)}")
