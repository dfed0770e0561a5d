"""
Топология Chimera и вложение в неё открытой цепочки Star-chain с m = 3

Ячейка u содержит спины 8u..8u+7: левая половина - локальные 0..3, правая - 4..7.
Внутри ячейки полный двудольный граф K_{4,4}; правый спин k ячейки u связан
с левым спином k ячейки u + 1.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from src.exceptions import DomainError
from src.models.hamiltonian import Edge, SpinHamiltonian, Topology
from src.models.star_chain import StarChainParams

logger = logging.getLogger(__name__)

UNIT_SIZE = 8
HALF = 4


def chimera_topology(units: int) -> Topology:
    if units < 1:
        raise DomainError(f"число ячеек Chimera должно быть >= 1, получено {units}")
    edges = set()
    for u in range(units):
        base = UNIT_SIZE * u
        for left in range(HALF):
            for right in range(HALF):
                edges.add((base + left, base + HALF + right))
        if u + 1 < units:
            for k in range(HALF):
                edges.add((base + HALF + k, base + UNIT_SIZE + k))
    return frozenset(edges)


def chimera_hub_layout(units: int) -> List[Tuple[int, List[int]]]:
    """
    Центры открытой цепочки по два на ячейку: левый и правый спин, соединённые внутри ячейки;
    правый центр ячейки u связан с левым центром ячейки u + 1 межъячеечным ребром.
    Возвращает список (центр, его три листа) в порядке вдоль цепочки.
    """
    layout = []
    for u in range(units):
        base = UNIT_SIZE * u
        left = 0 if u % 2 == 0 else HALF - 1
        right_local = HALF - 1 if u % 2 == 0 else 0
        right = HALF + right_local
        left_leaves = [base + HALF + k for k in range(HALF) if HALF + k != right]
        right_leaves = [base + k for k in range(HALF) if k != left]
        layout.append((base + left, left_leaves))
        layout.append((base + right, right_leaves))
    return layout


def embed_star_chain_in_chimera(p: StarChainParams) -> SpinHamiltonian:
    """Открытая Star-chain с m = 3 и n = 2 * units центрами на топологии Chimera"""
    if not p.open_chain or p.leaves_per_unit != HALF - 1 or p.n_units % 2:
        raise DomainError("вкладывается только открытая цепочка с m = 3 и чётным числом центров")
    units = p.n_units // 2
    layout = chimera_hub_layout(units)
    topology = chimera_topology(units)
    fields = np.zeros(UNIT_SIZE * units)
    couplings: Dict[Edge, float] = {}
    for index, (hub, leaves) in enumerate(layout):
        fields[hub] = p.a
        for leaf in leaves:
            fields[leaf] = p.b
            couplings[tuple(sorted((hub, leaf)))] = float(p.b)
        if index + 1 < len(layout):
            couplings[tuple(sorted((hub, layout[index + 1][0])))] = float(p.j)
    return SpinHamiltonian(UNIT_SIZE * units, fields, couplings, topology)
