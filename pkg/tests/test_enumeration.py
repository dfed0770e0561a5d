import itertools

import numpy as np
import pytest
from scipy.special import logsumexp

from src.enumeration import (
    MAX_SPECTRUM_SPINS,
    configure_threads,
    enumerate_gradient,
    enumerate_spectrum,
    enumerate_stats,
    gray_tour_final_energy,
    level_statistics,
)
from src.exceptions import SizeLimitError
from src.models import SpinHamiltonian, ring_topology
from src.thermo import thermal_stats


def random_hamiltonian(rng, n, topology=None, scale=1.0):
    hm = SpinHamiltonian.zero(n, topology)
    edges = hm.edges()
    return hm.with_parameters(rng.normal(scale=scale, size=n), rng.normal(scale=scale, size=len(edges)))


def brute_force(hm, beta=1.0):
    energies = np.array([hm.energy(s) for s in itertools.product((-1.0, 1.0), repeat=hm.n_spins)])
    log_w = -beta * energies
    log_z = logsumexp(log_w)
    p = np.exp(log_w - log_z)
    mean = p @ energies
    return log_z, mean, beta ** 2 * (p @ (energies - mean) ** 2)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_enumeration_matches_brute_force(n, rng):
    hm = random_hamiltonian(rng, n)
    stats = enumerate_stats(hm, beta=0.8)
    log_z, mean, heat_capacity = brute_force(hm, beta=0.8)
    assert stats.log_partition == pytest.approx(log_z, rel=1e-12)
    assert stats.mean_energy == pytest.approx(mean, rel=1e-10, abs=1e-12)
    assert stats.heat_capacity == pytest.approx(heat_capacity, rel=1e-10, abs=1e-12)


def test_segmented_tour_matches_spectrum_stats(rng):
    hm = random_hamiltonian(rng, 13, ring_topology(13))
    assert enumerate_stats(hm).heat_capacity == pytest.approx(
        thermal_stats(enumerate_spectrum(hm)).heat_capacity, rel=1e-9
    )


@pytest.mark.parametrize("n", [4, 6, 8])
def test_gradient_matches_central_differences(n, rng):
    h = 1e-5
    for _ in range(17):
        hm = random_hamiltonian(rng, n)
        _, record = enumerate_gradient(hm)
        edges = hm.edges()
        theta = np.concatenate([hm.fields, hm.coupling_vector(edges)])

        def heat_capacity(values):
            return enumerate_stats(hm.with_parameters(values[:n], values[n:])).heat_capacity

        numeric = np.empty_like(theta)
        for k in range(theta.size):
            step = np.zeros_like(theta)
            step[k] = h
            numeric[k] = (heat_capacity(theta + step) - heat_capacity(theta - step)) / (2 * h)
        analytic = record.as_vector(edges)
        assert np.linalg.norm(analytic - numeric) <= 1e-5 * max(np.linalg.norm(numeric), 1e-8)


@pytest.mark.parametrize("threads", [2, 8])
def test_results_do_not_depend_on_thread_count(rng, threads):
    hm = random_hamiltonian(rng, 14)
    previous = configure_threads(None)
    try:
        configure_threads(1)
        single, single_gradient = enumerate_gradient(hm)
        configure_threads(threads)
        other, other_gradient = enumerate_gradient(hm)
    finally:
        configure_threads(previous)
    assert single == other
    assert np.array_equal(single_gradient.d_c_d_field, other_gradient.d_c_d_field)
    assert single_gradient.d_c_d_coupling == other_gradient.d_c_d_coupling


def test_zero_hamiltonian():
    stats = enumerate_stats(SpinHamiltonian.zero(5))
    assert stats.log_partition == pytest.approx(5 * np.log(2.0))
    assert stats.heat_capacity == pytest.approx(0.0, abs=1e-15)
    spectrum = enumerate_spectrum(SpinHamiltonian.zero(5))
    assert spectrum.levels == [(0.0, 32)]


def test_spectrum_dimension_and_limit(rng):
    spectrum = enumerate_spectrum(random_hamiltonian(rng, 10))
    assert spectrum.total_dim == 2 ** 10
    assert spectrum.ground_energy == 0.0
    with pytest.raises(SizeLimitError):
        enumerate_spectrum(SpinHamiltonian.zero(MAX_SPECTRUM_SPINS + 1, topology=[]))


def test_third_moment_gives_beta_derivative(rng):
    hm = random_hamiltonian(rng, 7)
    beta, h = 1.3, 1e-5
    derivative = enumerate_stats(hm, beta).heat_capacity_beta_derivative
    numeric = (enumerate_stats(hm, beta + h).heat_capacity - enumerate_stats(hm, beta - h).heat_capacity) / (2 * h)
    assert derivative == pytest.approx(numeric, rel=1e-6)


def test_level_statistics_are_populations(rng):
    ground, first, tail = level_statistics(random_hamiltonian(rng, 6), 0.5)
    assert ground + first + tail == pytest.approx(1.0)
    assert min(ground, first, tail) >= 0.0
    assert level_statistics(SpinHamiltonian.zero(4)) == (pytest.approx(1.0), 0.0, 0.0)


@pytest.mark.parametrize("n", [6, 12, 18])
def test_gray_tour_energy_does_not_drift(n, rng):
    hm = random_hamiltonian(rng, n, scale=3.0)
    accumulated, direct = gray_tour_final_energy(hm)
    assert abs(accumulated - direct) <= 1e-9 * max(1.0, hm.max_abs_parameter() * n * n)
