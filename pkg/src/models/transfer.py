"""
Симметричная трансфер-матрица 2x2 с точными производными ln Z по beta

Элементы задаются логарифмами L_ab(beta) и их первыми и вторыми производными.
Производные собственных значений берутся из теории возмущений:
l' = v^T S' v,  l'' = v^T S'' v + 2 (v_+^T S' v_-)^2 / (l - l_other).
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransferEntries:
    """Логарифмы элементов (11, 12, 22) и их производные по beta"""

    log_values: Tuple[float, float, float]
    first: Tuple[float, float, float]
    second: Tuple[float, float, float]


@dataclass(frozen=True)
class TransferResult:
    log_partition: float
    d_log_partition: float
    d2_log_partition: float
    eigenvalues: Tuple[float, float]
    log_scale: float


def log_cosh(x: float) -> float:
    ax = abs(x)
    return ax + math.log1p(math.exp(-2.0 * ax)) - math.log(2.0)


def sech_squared(x: float) -> float:
    q = math.exp(-2.0 * abs(x))
    return 4.0 * q / (1.0 + q) ** 2


def _symmetric(values) -> np.ndarray:
    a, b, c = values
    return np.array([[a, b], [b, c]], dtype=np.float64)


def trace_power_log_partition(entries: TransferEntries, n: int) -> TransferResult:
    """ln Tr S^n и две производные по beta для симметричной положительной S"""
    if n < 1:
        raise ValueError("степень трансфер-матрицы должна быть >= 1")
    log_values = np.array(entries.log_values, dtype=np.float64)
    scale = float(log_values.max())
    M = _symmetric(np.exp(log_values - scale))
    L1 = _symmetric(entries.first)
    L2 = _symmetric(entries.second)
    M1 = M * L1
    M2 = M * (L2 + L1 * L1)

    eigenvalues, vectors = np.linalg.eigh(M)
    lam_minus, lam_plus = float(eigenvalues[0]), float(eigenvalues[1])
    v_minus, v_plus = vectors[:, 0], vectors[:, 1]

    d_plus = float(v_plus @ M1 @ v_plus)
    d_minus = float(v_minus @ M1 @ v_minus)
    cross = float(v_plus @ M1 @ v_minus)
    split = lam_plus - lam_minus
    mixing = 2.0 * cross * cross / split if split > 0 else 0.0
    dd_plus = float(v_plus @ M2 @ v_plus) + mixing
    dd_minus = float(v_minus @ M2 @ v_minus) - mixing

    # Всё нормировано на lam_plus^n; r = lam_minus / lam_plus, |r| < 1
    r = lam_minus / lam_plus
    z = 1.0 + r ** n
    z1 = n * (d_plus + r ** (n - 1) * d_minus) / lam_plus
    z2 = n * (dd_plus + r ** (n - 1) * dd_minus) / lam_plus
    if n >= 2:
        z2 += n * (n - 1) * (d_plus ** 2 + r ** (n - 2) * d_minus ** 2) / lam_plus ** 2

    log_partition = n * (scale + math.log(lam_plus)) + math.log1p(r ** n)
    d_log = z1 / z
    d2_log = z2 / z - d_log * d_log
    return TransferResult(
        log_partition=log_partition,
        d_log_partition=d_log,
        d2_log_partition=d2_log,
        eigenvalues=(lam_plus, lam_minus),
        log_scale=scale,
    )
