"""
Поиск гамильтонианов с максимальной теплоёмкостью методом ADAM

Минимизируется функция потерь L(theta) = -C(theta); сохраняется лучшая
из всех посещённых точек, а не последняя.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
from typing import List, Optional, Sequence

import numpy as np

from src.exceptions import OptimizationAborted, RestartsExhausted
from src.optimizer.config import ExplicitInit, OptimizerConfig, WarmStart
from src.optimizer.spaces import ParameterSpace, TiedSpace

logger = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
TRAJECTORY_POINTS = 1000


class Adam:
    """ADAM с поправкой смещения первого и второго моментов"""

    def __init__(self, n_params: int, beta1: float = ADAM_BETA1, beta2: float = ADAM_BETA2, epsilon: float = ADAM_EPSILON):
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def update(self, theta: np.ndarray, gradient: np.ndarray, learning_rate: float) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * gradient
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * gradient * gradient
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return theta - learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


@dataclass
class TrajectoryPoint:
    step: int
    heat_capacity: float
    learning_rate: float


@dataclass
class OptimizationRun:
    """Итог одного запуска ADAM (или лучшего из серии перезапусков)"""

    config: dict
    space: dict
    restart: int
    best_theta: List[float]
    best_c: float
    best_step: int
    final_theta: List[float]
    trajectory: List[TrajectoryPoint]
    wall_time: float
    best_params: dict = field(default_factory=dict)
    restart_summary: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "space": self.space,
            "restart": self.restart,
            "best_c": self.best_c,
            "best_step": self.best_step,
            "best_theta": self.best_theta,
            "best_params": self.best_params,
            "final_theta": self.final_theta,
            "trajectory": [[p.step, p.heat_capacity, p.learning_rate] for p in self.trajectory],
            "restart_summary": self.restart_summary,
        }


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Независимый детерминированный поток для перезапуска"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(restart)]))


def adam_maximize(
    space: ParameterSpace,
    cfg: OptimizerConfig,
    beta: float = 1.0,
    restart: int = 0,
) -> OptimizationRun:
    """Один запуск ADAM из начального приближения cfg.init (или умолчания пространства)"""
    started = time.perf_counter()
    theta = space.initial_theta(cfg.init, restart_rng(cfg.seed, restart))
    adam = Adam(space.n_params)
    stride = max(1, math.ceil(cfg.steps / TRAJECTORY_POINTS))
    report_every = max(1, cfg.steps // 10)

    best_c = -math.inf
    best_theta = theta.copy()
    best_step = 0
    trajectory: List[TrajectoryPoint] = []

    for step in range(cfg.steps + 1):
        c, gradient = space.evaluate(theta, beta)
        if not math.isfinite(c) or not np.all(np.isfinite(gradient)):
            raise OptimizationAborted(step, f"нефинитные C={c} или градиент", theta)
        if c > best_c:
            best_c, best_theta, best_step = c, theta.copy(), step
        rate = cfg.rate(step, restart)
        if step % stride == 0 or step == cfg.steps:
            trajectory.append(TrajectoryPoint(step, float(c), float(rate)))
        if step and step % report_every == 0:
            logger.info(f"[перезапуск {restart}] шаг {step}/{cfg.steps}: C = {c:.6f}, лучшее {best_c:.6f}")
        if step == cfg.steps:
            break
        theta = adam.update(theta, -gradient, rate)

    run = OptimizationRun(
        config=cfg.to_dict(),
        space=space.describe(),
        restart=restart,
        best_theta=best_theta.tolist(),
        best_c=float(best_c),
        best_step=best_step,
        final_theta=theta.tolist(),
        trajectory=trajectory,
        wall_time=time.perf_counter() - started,
        best_params=space.named(best_theta),
    )
    logger.info(f"[перезапуск {restart}] завершён: C = {run.best_c:.6f} на шаге {best_step}")
    return run


def _restart_worker(space: ParameterSpace, cfg: OptimizerConfig, beta: float, restart: int):
    try:
        return adam_maximize(space, cfg, beta, restart), None
    except OptimizationAborted as e:
        return None, str(e)


def multi_restart(
    space: ParameterSpace,
    cfg: OptimizerConfig,
    beta: float = 1.0,
    parallel: bool = False,
    max_workers: Optional[int] = None,
) -> OptimizationRun:
    """
    Серия независимых запусков; возвращается запуск с максимальной C
    (при равенстве - с меньшим номером перезапуска)

    Args:
        parallel: перезапуски в отдельных процессах; потоки RNG те же, что и при последовательном счёте
    """
    restarts = range(cfg.restarts)
    if parallel and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(_restart_worker, repeat(space), repeat(cfg), repeat(beta), restarts))
    else:
        outcomes = [_restart_worker(space, cfg, beta, restart) for restart in restarts]

    runs: List[OptimizationRun] = []
    summary: List[dict] = []
    for restart, (run, error) in zip(restarts, outcomes):
        if run is None:
            logger.error(f"Перезапуск {restart} прерван: {error}")
            summary.append({"restart": restart, "status": "aborted", "error": error})
            continue
        runs.append(run)
        summary.append({"restart": restart, "status": "ok", "best_c": run.best_c,
                        "learning_rate": cfg.base_rate(restart)})

    if not runs:
        raise RestartsExhausted(f"ни один из {cfg.restarts} перезапусков не завершился")

    best = runs[0]
    for run in runs[1:]:
        if run.best_c > best.best_c:
            best = run
    best.restart_summary = summary
    logger.info(f"Лучший перезапуск {best.restart}: C = {best.best_c:.6f} ({len(runs)}/{cfg.restarts} завершены)")
    return best


def tied_model_optimize(
    model: str,
    cfg: OptimizerConfig,
    n_spins: int,
    beta: float = 1.0,
    leaves_per_unit: int = 3,
    open_chain: bool = False,
    parallel: bool = False,
) -> OptimizationRun:
    """ADAM в пространстве именованных параметров семейства (star, star_constrained, star_chain, ising, all_to_all)"""
    space = TiedSpace.of(model, n_spins, leaves_per_unit, open_chain)
    if cfg.restarts == 1:
        return adam_maximize(space, cfg, beta)
    return multi_restart(space, cfg, beta, parallel)


def warm_start_chain(
    model: str,
    n_values: Sequence[int],
    cfg: OptimizerConfig,
    beta: float = 1.0,
    leaves_per_unit: int = 3,
    first_init: Optional[Sequence[float]] = None,
    open_chain: bool = False,
) -> List[OptimizationRun]:
    """Последовательные оптимизации по N; каждая стартует из оптимума предыдущей"""
    runs: List[OptimizationRun] = []
    init = ExplicitInit(tuple(first_init)) if first_init is not None else cfg.init
    for n in n_values:
        run = tied_model_optimize(model, replace(cfg, init=init), n, beta, leaves_per_unit, open_chain)
        runs.append(run)
        init = WarmStart(tuple(run.best_theta))
        logger.info(f"{model} N={n}: C = {run.best_c:.6f}, параметры {run.best_params}")
    return runs
