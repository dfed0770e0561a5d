import math
from typing import List

import numpy as np
import pytest

from src.analysis import analytic_optimum
from src.exceptions import OptimizationAborted, RestartsExhausted, SpinThermoValidationError
from src.models import SpinHamiltonian
from src.optimizer import (
    Adam,
    BoundedSpace,
    CyclicSchedule,
    DirectSpace,
    ExplicitInit,
    OptimizerConfig,
    ParameterSpace,
    TiedSpace,
    UniformInit,
    WarmStart,
    adam_maximize,
    cyclic_lr,
    detect_structure,
    multi_restart,
    warm_start_chain,
)


class NanSpace(ParameterSpace):
    """Пространство, на котором C не определена"""

    kind = "nan"

    @property
    def names(self) -> List[str]:
        return ["x"]

    def evaluate(self, theta, beta):
        return math.nan, np.zeros(1)

    def render(self, theta):
        return None


def test_adam_first_step_moves_by_learning_rate():
    theta = Adam(2).update(np.zeros(2), np.array([2.0, -0.5]), 0.1)
    assert theta == pytest.approx([-0.1, 0.1], rel=1e-6)


def test_cyclic_schedule_shape():
    schedule = CyclicSchedule(0.001, 0.1, 100)
    assert cyclic_lr(0, schedule) == pytest.approx(0.001)
    assert cyclic_lr(100, schedule) == pytest.approx(0.1)
    assert cyclic_lr(200, schedule) == pytest.approx(0.001)
    assert cyclic_lr(300, schedule) == pytest.approx(0.001 + 0.099 / 2)
    flat = CyclicSchedule(0.001, 0.1, 100, halve_each_cycle=False)
    assert cyclic_lr(300, flat) == pytest.approx(0.1)


def test_config_from_dict():
    cfg = OptimizerConfig.from_dict({
        "steps": 100,
        "learning_rate": 0.01,
        "schedule": {"kind": "cyclic_triangular", "alpha_min": 0.0003, "alpha_max": 0.2, "up_steps": 6000},
        "init": {"kind": "uniform", "lo": -1.0, "hi": 0.0},
    })
    assert isinstance(cfg.schedule, CyclicSchedule)
    assert cfg.init == UniformInit(-1.0, 0.0)
    assert OptimizerConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("payload, field", [
    ({"stepz": 10}, "optimizer"),
    ({"steps": -1}, "steps"),
    ({"learning_rate": 0.0}, "learning_rate"),
    ({"init": {"kind": "gaussian"}}, "init.kind"),
    ({"schedule": {"kind": "fixed", "alpha": 1}}, "schedule"),
    ({"restart_learning_rates": [0.01], "schedule": {"kind": "cyclic_triangular", "alpha_min": 0.1,
                                                     "alpha_max": 0.2, "up_steps": 5}}, "restart_learning_rates"),
])
def test_config_rejects_bad_values(payload, field):
    with pytest.raises(SpinThermoValidationError) as info:
        OptimizerConfig.from_dict(payload)
    assert info.value.field == field


def test_restart_learning_rates_cycle():
    cfg = OptimizerConfig(restarts=4, restart_learning_rates=(0.01, 0.03))
    assert [cfg.rate(5, r) for r in range(4)] == [0.01, 0.03, 0.01, 0.03]


def test_zero_steps_reports_initial_point():
    space = TiedSpace.of("star_constrained", 7)
    run = adam_maximize(space, OptimizerConfig(steps=0, init=ExplicitInit((1.267,))))
    assert run.best_step == 0
    assert run.best_theta == [1.267]
    assert run.best_c == pytest.approx(space.heat_capacity([1.267], 1.0))
    assert len(run.trajectory) == 1


def test_tied_star_converges_to_known_optimum():
    cfg = OptimizerConfig(steps=6000, learning_rate=0.01, init=ExplicitInit((6.0,)))
    run = adam_maximize(TiedSpace.of("star_constrained", 7), cfg)
    assert run.best_params["b"] == pytest.approx(1.267, abs=0.01)
    assert run.best_params["a"] == pytest.approx(5.070, abs=0.05)


def test_best_point_is_kept_not_last():
    # Большой шаг заставляет ADAM проскакивать максимум
    cfg = OptimizerConfig(steps=50, learning_rate=1.5, init=ExplicitInit((2.0,)))
    space = TiedSpace.of("star_constrained", 7)
    run = adam_maximize(space, cfg)
    assert run.best_c == max(p.heat_capacity for p in run.trajectory)
    assert run.best_c >= space.heat_capacity(run.final_theta, 1.0)


def test_non_finite_values_abort():
    with pytest.raises(OptimizationAborted) as info:
        adam_maximize(NanSpace(), OptimizerConfig(steps=10))
    assert info.value.step == 0
    with pytest.raises(RestartsExhausted):
        multi_restart(NanSpace(), OptimizerConfig(steps=10, restarts=2))


def test_multi_restart_is_deterministic_and_picks_best():
    cfg = OptimizerConfig(steps=40, learning_rate=0.05, restarts=3, seed=7)
    first = multi_restart(DirectSpace(3), cfg)
    second = multi_restart(DirectSpace(3), cfg)
    assert first.best_theta == second.best_theta
    assert len(first.restart_summary) == 3
    assert first.best_c == max(item["best_c"] for item in first.restart_summary)


def test_parallel_restarts_match_sequential():
    cfg = OptimizerConfig(steps=30, learning_rate=0.05, restarts=2, seed=3)
    sequential = multi_restart(DirectSpace(3), cfg)
    parallel = multi_restart(DirectSpace(3), cfg, parallel=True, max_workers=2)
    assert parallel.best_theta == sequential.best_theta
    assert parallel.restart == sequential.restart


def test_direct_space_gradient_matches_finite_difference(rng):
    space = DirectSpace(4)
    theta = rng.uniform(-1.0, 1.0, space.n_params)
    _, gradient = space.evaluate(theta, 1.0)
    h = 1e-6
    for k in range(space.n_params):
        step = np.zeros_like(theta)
        step[k] = h
        numeric = (space.heat_capacity(theta + step, 1.0) - space.heat_capacity(theta - step, 1.0)) / (2 * h)
        assert gradient[k] == pytest.approx(numeric, rel=1e-5, abs=1e-8)


def test_bounded_space_respects_bound(rng):
    space = BoundedSpace(4, 0.5)
    theta = rng.normal(scale=5.0, size=space.n_params)
    hm = space.render(theta)
    assert hm.max_abs_parameter() <= 0.5
    _, gradient = space.evaluate(theta, 1.0)
    h = 1e-6
    step = np.zeros_like(theta)
    step[0] = h
    numeric = (space.heat_capacity(theta + step, 1.0) - space.heat_capacity(theta - step, 1.0)) / (2 * h)
    assert gradient[0] == pytest.approx(numeric, rel=1e-5, abs=1e-9)


def test_initial_theta_validates_length():
    with pytest.raises(SpinThermoValidationError, match="ожидалось 1"):
        adam_maximize(TiedSpace.of("star_constrained", 7), OptimizerConfig(steps=1, init=ExplicitInit((1.0, 2.0))))


def test_warm_start_chain_passes_optimum_forward():
    cfg = OptimizerConfig(steps=2000, learning_rate=0.01)
    runs = warm_start_chain("star_constrained", [6, 7, 8], cfg, first_init=(6.0,))
    assert runs[0].config["init"] == {"values": [6.0], "kind": "explicit"}
    for previous, current in zip(runs, runs[1:]):
        assert current.config["init"] == {"values": previous.best_theta, "kind": "warm_start"}
    assert [r.space["n_spins"] for r in runs] == [6, 7, 8]


def test_tied_space_renders_explicit_hamiltonian():
    space = TiedSpace.of("star_chain", 8)
    hm = space.render([1.964, 1.101, -1.191])
    assert isinstance(hm, SpinHamiltonian)
    assert hm.n_spins == 8
    assert TiedSpace.of("star_constrained", 40).render([8.0]) is None


@pytest.mark.slow
def test_direct_search_finds_all_to_all_at_four_spins():
    cfg = OptimizerConfig(steps=60000, learning_rate=0.001, init=UniformInit(-1.0, 0.0), restarts=2)
    space = DirectSpace(4)
    run = multi_restart(space, cfg)
    hm = space.render(run.best_theta)
    assert detect_structure(hm).verdict == "all-to-all"
    assert np.abs(hm.fields) == pytest.approx([0.377] * 4, abs=0.01)


@pytest.mark.slow
def test_direct_search_finds_star_at_seven_spins():
    cfg = OptimizerConfig(steps=60000, learning_rate=0.001, init=UniformInit(-1.0, 0.0), restarts=2)
    space = DirectSpace(7)
    run = multi_restart(space, cfg)
    report = detect_structure(space.render(run.best_theta))
    assert report.verdict == "star"


@pytest.mark.slow
@pytest.mark.parametrize("n", range(2, 13))
def test_direct_search_matches_best_tied_family(n):
    cfg = OptimizerConfig(steps=60000, learning_rate=0.001, init=UniformInit(-1.0, 0.0), restarts=2)
    run = multi_restart(DirectSpace(n), cfg)
    tied = max(analytic_optimum(name, n)[0] for name in ("star", "all_to_all"))
    assert run.best_c == pytest.approx(tied, rel=5e-3)
