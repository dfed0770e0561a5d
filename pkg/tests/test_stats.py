import math

import numpy as np
import pytest

from src.exceptions import DomainError
from src.thermo import (
    DegenerateModel,
    GapTemplate,
    Spectrum,
    c_opt,
    degenerate_heat_capacity,
    estimation_error_bound,
    gibbs_populations,
    max_c_over_gap,
    optimal_gap,
    single_spin_c_max,
    thermal_stats,
)

LN2 = math.log(2.0)


def test_two_level_system_closed_form():
    gap = 1.7
    stats = thermal_stats(Spectrum((0.0, gap), (1, 1)), beta=1.0)
    p = 1.0 / (1.0 + math.exp(gap))
    assert stats.log_partition == pytest.approx(math.log(1.0 + math.exp(-gap)), rel=1e-14)
    assert stats.mean_energy == pytest.approx(gap * p, rel=1e-14)
    assert stats.heat_capacity == pytest.approx(gap ** 2 * p * (1 - p), rel=1e-13)


def test_populations_sum_to_one_and_follow_gibbs():
    s = Spectrum((0.0, 1.0, 3.0), (1, 4, 9))
    populations = [p for _, p in gibbs_populations(s, beta=0.7)]
    assert sum(populations) == pytest.approx(1.0, abs=1e-15)
    assert populations[1] / populations[0] == pytest.approx(4 * math.exp(-0.7), rel=1e-13)


def test_huge_energies_do_not_overflow():
    stats = thermal_stats(Spectrum((0.0, 5000.0), (1, 2 ** 200)), beta=1.0)
    assert math.isfinite(stats.log_partition)
    assert stats.heat_capacity >= 0.0


def random_spectrum(rng, n_levels=6):
    energies = np.sort(rng.uniform(0.0, 10.0, n_levels))
    degeneracies = rng.integers(1, 50, n_levels)
    return tuple(float(e) for e in energies), tuple(int(d) for d in degeneracies)


@pytest.mark.parametrize("offset", [-250.0, -1.5, 0.3, 40.0])
def test_heat_capacity_is_shift_invariant(rng, offset):
    for _ in range(20):
        energies, degeneracies = random_spectrum(rng)
        base = thermal_stats(Spectrum(energies, degeneracies), beta=1.3)
        moved = thermal_stats(Spectrum(tuple(e + offset for e in energies), degeneracies), beta=1.3)
        assert moved.heat_capacity == pytest.approx(base.heat_capacity, rel=1e-12)
        assert moved.energy_variance == pytest.approx(base.energy_variance, rel=1e-12)
        assert moved.mean_energy == pytest.approx(base.mean_energy + offset, rel=1e-12, abs=1e-10)


@pytest.mark.parametrize("scale", [0.1, 2.0, 10.0])
def test_heat_capacity_is_scale_invariant(rng, scale):
    for _ in range(20):
        energies, degeneracies = random_spectrum(rng)
        base = thermal_stats(Spectrum(energies, degeneracies), beta=1.0)
        scaled = thermal_stats(Spectrum(tuple(scale * e for e in energies), degeneracies), beta=1.0 / scale)
        assert scaled.heat_capacity == pytest.approx(base.heat_capacity, rel=1e-12)


@pytest.mark.parametrize("beta", [0.0, -1.0, float("inf")])
def test_invalid_beta(beta):
    with pytest.raises(DomainError):
        thermal_stats(Spectrum((0.0, 1.0), (1, 1)), beta)


def test_single_spin_maximum():
    gap, c = single_spin_c_max()
    assert c == pytest.approx(0.44, abs=0.005)
    assert gap == pytest.approx(2.3994, abs=1e-3)


@pytest.mark.parametrize("D", [3, 4, 64, 2 ** 20, 2 ** 60])
def test_optimal_gap_solves_transcendental_equation(D):
    x = optimal_gap(D)
    lhs = x + math.log(x - 2.0)
    rhs = math.log(D - 1) + math.log(x + 2.0)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
    assert x > 2.0


def test_optimal_gap_domain():
    with pytest.raises(DomainError):
        optimal_gap(2)
    with pytest.raises(DomainError):
        optimal_gap(3.5)


def test_c_opt_matches_degenerate_model_and_is_maximal():
    D = 2 ** 8
    x = optimal_gap(D)
    direct = DegenerateModel(D, x).stats().heat_capacity
    assert c_opt(D) == pytest.approx(direct, rel=1e-12)
    for dx in (-0.05, 0.05):
        assert degenerate_heat_capacity(D, x + dx) < c_opt(D)


def test_c_opt_asymptotics():
    # (x^2 - 4)/4 с x > ln D: отношение к N^2 (ln 2)^2 / 4 стремится к 1 сверху
    ratios = []
    for n in range(8, 21):
        D = 2 ** n
        assert abs(optimal_gap(D) - math.log(D)) <= 3.0
        ratios.append(c_opt(D) / (n * n * LN2 * LN2 / 4.0))
    assert all(r >= 1.0 for r in ratios)
    assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1.0, abs=0.05)


def test_estimation_error_bound():
    assert estimation_error_bound(4.0, 10) == pytest.approx(0.025)
    with pytest.raises(DomainError):
        estimation_error_bound(0.0, 10)
    with pytest.raises(DomainError):
        estimation_error_bound(1.0, 0)


def test_max_c_over_gap_recovers_c_opt():
    D = 2 ** 6
    gap, c = max_c_over_gap(GapTemplate(first_degeneracy=D - 1))
    assert c == pytest.approx(c_opt(D), rel=1e-9)
    assert gap == pytest.approx(optimal_gap(D), rel=1e-5)


def test_max_c_over_gap_accepts_callable_template():
    gap, c = max_c_over_gap(lambda g: Spectrum((0.0, g), (1, 7)))
    assert c == pytest.approx(c_opt(8), rel=1e-8)


def test_adding_levels_above_gap_never_decreases_max_c(rng):
    for _ in range(200):
        base = GapTemplate(first_degeneracy=int(rng.integers(1, 50)))
        extra = [(float(rng.uniform(1.0, 4.0)), int(rng.integers(1, 30))) for _ in range(int(rng.integers(1, 4)))]
        _, before = max_c_over_gap(base)
        _, after = max_c_over_gap(base.with_levels(extra))
        assert after >= before - 1e-9


def test_heat_capacity_beta_derivative_matches_finite_difference():
    s = Spectrum((0.0, 0.8, 2.1, 3.0), (1, 3, 5, 2))
    beta, h = 0.9, 1e-5
    analytic = thermal_stats(s, beta).heat_capacity_beta_derivative
    numeric = (thermal_stats(s, beta + h).heat_capacity - thermal_stats(s, beta - h).heat_capacity) / (2 * h)
    assert analytic == pytest.approx(numeric, rel=1e-6)


def test_gap_template_validation():
    with pytest.raises(DomainError):
        GapTemplate(first_degeneracy=0)
    with pytest.raises(DomainError):
        GapTemplate(extra_levels=((0.5, 1),))
    assert GapTemplate(3, ((2.0, 4),)).total_dim == 8
    assert np.allclose(GapTemplate(3, ((2.0, 4),)).spectrum(1.5).energies, (0.0, 1.5, 3.0))
