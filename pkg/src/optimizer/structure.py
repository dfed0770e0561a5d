"""
Распознавание структуры найденного гамильтониана: all-to-all, Star (или Star-bar),
вложение star-chain с m = 3, иначе "other"

Сравнение идёт после калибровочной нормализации (переворот спинов с h_i < 0),
с точностью до перестановки спинов.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from src.models.hamiltonian import SpinHamiltonian, gauge_normalize

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.1
MATCH_RTOL = 0.02

VERDICT_ALL_TO_ALL = "all-to-all"
VERDICT_STAR = "star"
VERDICT_STAR_CHAIN = "star-chain m=3 embedding"
VERDICT_OTHER = "other"


@dataclass
class StructureReport:
    verdict: str
    hubs: List[int] = field(default_factory=list)
    fingerprint: Dict[str, List[float]] = field(default_factory=dict)
    flipped: List[int] = field(default_factory=list)
    variant: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "variant": self.variant,
            "hubs": self.hubs,
            "flipped": self.flipped,
            "fingerprint": self.fingerprint,
        }


def fingerprint(hm: SpinHamiltonian) -> Dict[str, List[float]]:
    """Инварианты перестановок: отсортированные |h_i| и суммы |J_ij| по каждому спину"""
    sums = np.zeros(hm.n_spins)
    for (i, j), v in hm.couplings.items():
        sums[i] += abs(v)
        sums[j] += abs(v)
    return {
        "fields": sorted(float(abs(h)) for h in hm.fields),
        "coupling_sums": sorted(float(s) for s in sums),
    }


def _close(x: float, y: float, scale: float, rtol: float = MATCH_RTOL) -> bool:
    return abs(x - y) <= rtol * max(abs(x), abs(y), SIGNIFICANCE * scale)


def _all_close(values: Sequence[float], scale: float) -> bool:
    values = list(values)
    return all(_close(v, values[0], scale) for v in values[1:])


def fingerprints_match(first: Dict[str, List[float]], second: Dict[str, List[float]], rtol: float = MATCH_RTOL) -> bool:
    scale = max([abs(v) for key in ("fields", "coupling_sums") for v in first[key] + second[key]] or [0.0])
    for key in ("fields", "coupling_sums"):
        if len(first[key]) != len(second[key]):
            return False
        if not all(_close(x, y, scale, rtol) for x, y in zip(first[key], second[key])):
            return False
    return True


def _adjacency(hm: SpinHamiltonian, threshold: float) -> List[Set[int]]:
    adjacency: List[Set[int]] = [set() for _ in range(hm.n_spins)]
    for (i, j), v in hm.couplings.items():
        if abs(v) > threshold:
            adjacency[i].add(j)
            adjacency[j].add(i)
    return adjacency


def _is_all_to_all(hm: SpinHamiltonian, adjacency: List[Set[int]], scale: float) -> bool:
    n = hm.n_spins
    if n < 2 or any(len(row) != n - 1 for row in adjacency):
        return False
    couplings = [abs(hm.coupling(i, j)) for i in range(n) for j in range(i + 1, n)]
    return _all_close(np.abs(hm.fields), scale) and _all_close(couplings, scale)


def _star_hubs(hm: SpinHamiltonian, adjacency: List[Set[int]], scale: float) -> Optional[List[int]]:
    n = hm.n_spins
    hubs = [i for i in range(n) if len(adjacency[i]) == n - 1]
    if len(hubs) == 1 and n >= 3:
        hub = hubs[0]
        leaves = [i for i in range(n) if i != hub]
        if any(len(adjacency[i]) != 1 for i in leaves):
            return None
        values = [abs(hm.fields[i]) for i in leaves] + [abs(hm.coupling(hub, i)) for i in leaves]
        return [hub] if _all_close(values, scale) else None
    if len(hubs) == 2 and n >= 4:
        first, second = hubs
        leaves = [i for i in range(n) if i not in hubs]
        if any(len(adjacency[i]) != 2 for i in leaves):
            return None
        if any(abs(hm.fields[i]) > SIGNIFICANCE * scale for i in leaves):
            return None
        values = [abs(hm.fields[first]), abs(hm.fields[second])]
        values += [abs(hm.coupling(h, i)) for h in hubs for i in leaves]
        return hubs if _all_close(values, scale) else None
    return None


def _star_chain_hubs(hm: SpinHamiltonian, adjacency: List[Set[int]], leaves_per_unit: int = 3) -> Optional[List[int]]:
    leaves = [i for i in range(hm.n_spins) if len(adjacency[i]) == 1]
    owners: Dict[int, List[int]] = {}
    for leaf in leaves:
        owners.setdefault(next(iter(adjacency[leaf])), []).append(leaf)
    hubs = sorted(owners)
    if len(hubs) < 2 or len(hubs) + len(leaves) != hm.n_spins:
        return None
    if any(len(owners[h]) != leaves_per_unit for h in hubs):
        return None

    # Центры образуют путь или кольцо
    hub_set = set(hubs)
    hub_graph = {h: adjacency[h] & hub_set for h in hubs}
    if any(len(nbrs) > 2 or not nbrs for nbrs in hub_graph.values()):
        return None
    seen, stack = {hubs[0]}, [hubs[0]]
    while stack:
        for nbr in hub_graph[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return hubs if seen == hub_set else None


def detect_structure(hm: SpinHamiltonian) -> StructureReport:
    normalized, flipped = gauge_normalize(hm)
    scale = normalized.max_abs_parameter()
    report = StructureReport(VERDICT_OTHER, fingerprint=fingerprint(normalized), flipped=flipped)
    if scale == 0.0:
        return report

    adjacency = _adjacency(normalized, SIGNIFICANCE * scale)
    if _is_all_to_all(normalized, adjacency, scale):
        report.verdict = VERDICT_ALL_TO_ALL
        return report

    hubs = _star_hubs(normalized, adjacency, scale)
    if hubs is not None:
        report.verdict, report.hubs = VERDICT_STAR, hubs
        report.variant = "star" if len(hubs) == 1 else "star-bar"
        return report

    hubs = _star_chain_hubs(normalized, adjacency)
    if hubs is not None:
        report.verdict, report.hubs = VERDICT_STAR_CHAIN, hubs
    logger.debug(f"Структура N={hm.n_spins}: {report.verdict}, центры {report.hubs}")
    return report


def privileged_per_unit(hm: SpinHamiltonian, unit_size: int, factor: float = 2.0) -> List[List[int]]:
    """Спины ячейки, у которых сумма |J| не меньше factor медианы по всей сети"""
    sums = np.zeros(hm.n_spins)
    for (i, j), v in hm.couplings.items():
        sums[i] += abs(v)
        sums[j] += abs(v)
    threshold = factor * float(np.median(sums))
    if threshold == 0.0:
        return [[] for _ in range(0, hm.n_spins, unit_size)]
    return [
        [i for i in range(start, min(start + unit_size, hm.n_spins)) if sums[i] >= threshold]
        for start in range(0, hm.n_spins, unit_size)
    ]
