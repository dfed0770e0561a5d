import json
import math

import numpy as np
import pytest

from src.enumeration import enumerate_spectrum, enumerate_stats
from src.exceptions import DomainError, SizeLimitError, SpinThermoValidationError
from src.models import (
    AllToAllParams,
    IsingParams,
    SpinHamiltonian,
    StarChainParams,
    StarParams,
    all_to_all_spectrum,
    analytic_spectrum,
    analytic_stats,
    build_all_to_all,
    build_ising_1d,
    build_star,
    build_star_bar,
    build_star_chain,
    chimera_hub_layout,
    chimera_topology,
    embed_star_chain_in_chimera,
    gauge_flip,
    gauge_normalize,
    ising_1d_stats,
    ksat_reference_curve,
    load_model,
    model_from_dict,
    parse_topology,
    render_model,
    save_model,
    star_chain_eigenvalues,
    star_chain_log_z,
    star_chain_spectrum,
    star_chain_stats,
    star_spectrum,
    star_stats,
    tied_model,
)
from src.thermo import Spectrum, c_opt


def assert_stats_close(analytic, enumerated, rel=1e-8):
    assert analytic.log_partition == pytest.approx(enumerated.log_partition, rel=rel)
    assert analytic.mean_energy == pytest.approx(enumerated.mean_energy, rel=rel, abs=1e-10)
    assert analytic.heat_capacity == pytest.approx(enumerated.heat_capacity, rel=rel, abs=1e-12)


def assert_spectra_equal(left, right):
    left, right = left.shifted(), right.shifted()
    assert left.degeneracies == right.degeneracies
    assert np.allclose(left.energies, right.energies, atol=1e-9)


# ===================== STAR =====================

@pytest.mark.parametrize("n", [3, 5, 7, 10, 14])
def test_star_closed_form_matches_enumeration(n, rng):
    for _ in range(20):
        p = StarParams(n, float(rng.uniform(-6, 6)), float(rng.uniform(-2, 2)))
        assert_stats_close(star_stats(p), enumerate_stats(build_star(p)))


def test_star_spectrum_matches_enumeration(rng):
    p = StarParams(8, float(rng.uniform(1, 4)), float(rng.uniform(0.3, 1.5)))
    assert_spectra_equal(star_spectrum(p), enumerate_spectrum(build_star(p)))
    assert star_spectrum(p).total_dim == 2 ** 8


def test_star_bar_has_star_spectrum():
    p = StarParams(7, 4.41, 1.15)
    assert_spectra_equal(enumerate_spectrum(build_star_bar(p)), star_spectrum(p))


@pytest.mark.parametrize("n", range(3, 15))
def test_star_optimum_is_sandwiched_by_ideal_models(n):
    best = max(
        star_stats(StarParams(n, a, b)).heat_capacity
        for a in np.linspace(0.5, 3.0 * n, 40)
        for b in np.linspace(0.2, 3.0, 40)
    )
    assert best <= c_opt(2 ** n) + 1e-12


def test_star_requires_two_spins():
    with pytest.raises(DomainError):
        StarParams(1, 1.0, 1.0)


# ===================== STAR-CHAIN =====================

@pytest.mark.parametrize("open_chain", [False, True])
def test_star_chain_matches_enumeration(open_chain, rng):
    for _ in range(20):
        p = StarChainParams(2, 3, float(rng.uniform(-3, 3)), float(rng.uniform(-2, 2)),
                            float(rng.uniform(-2, 2)), open_chain)
        assert_stats_close(star_chain_stats(p), enumerate_stats(build_star_chain(p)))


def test_star_chain_ring_of_three_matches_enumeration():
    p = StarChainParams(3, 3, 3.5, 1.55, -1.6)
    hm = build_star_chain(p)
    assert hm.n_spins == 12
    assert_stats_close(star_chain_stats(p), enumerate_stats(hm))
    assert_spectra_equal(star_chain_spectrum(p), enumerate_spectrum(hm))


def test_star_chain_eigenvalues_give_partition_function():
    p = StarChainParams(3, 3, 1.2, 0.7, -0.4)
    plus, minus = star_chain_eigenvalues(p)
    assert abs(plus) > abs(minus)
    assert math.log(plus ** 3 + minus ** 3) == pytest.approx(star_chain_log_z(p), rel=1e-12)


def test_single_unit_chain_is_a_star():
    p = StarChainParams(1, 4, 2.0, 0.9, -5.0)
    assert star_chain_stats(p).heat_capacity == pytest.approx(
        star_stats(StarParams(5, 2.0, 0.9)).heat_capacity, rel=1e-10
    )


def test_two_hub_chain_has_single_bond():
    ring = StarChainParams(2, 3, 1.964, 1.101, -1.191)
    path = StarChainParams(2, 3, 1.964, 1.101, -1.191, open_chain=True)
    assert ring.hub_edges() == {(0, 1): -1.191}
    hm = build_star_chain(ring)
    assert hm.coupling(0, 1) == pytest.approx(-1.191)
    assert star_chain_stats(ring).heat_capacity == pytest.approx(star_chain_stats(path).heat_capacity, rel=1e-12)
    assert_stats_close(star_chain_stats(ring), enumerate_stats(hm))


@pytest.mark.parametrize("open_chain", [False, True])
def test_strongly_coupled_chain_collapses_to_star(open_chain):
    # при J <= -20 центры выстроены, низкие уровни - спектр Star с N' = nm + 1 и a' = n a
    j = -25.0
    p = StarChainParams(3, 3, 1.2, 0.7, j, open_chain)
    chain = star_chain_spectrum(p)
    cutoff = chain.ground_energy + 2.0 * abs(j)
    low = [(e, d) for e, d in chain.levels if e < cutoff]
    low_spectrum = Spectrum(tuple(e for e, _ in low), tuple(d for _, d in low))
    assert_spectra_equal(low_spectrum, star_spectrum(StarParams(10, 3 * 1.2, 0.7)))


def test_star_chain_family_gradient_matches_finite_difference():
    model = tied_model("star_chain", 16)
    theta = np.array([3.5, 1.55, -1.6])
    _, gradient = model.family.heat_capacity_gradient(theta)
    h = 1e-6
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        numeric = (model.family.stats(theta + step).heat_capacity
                   - model.family.stats(theta - step).heat_capacity) / (2 * h)
        assert gradient[k] == pytest.approx(numeric, rel=1e-5, abs=1e-8)


def test_star_chain_family_needs_divisible_size():
    with pytest.raises(DomainError, match="делится"):
        tied_model("star_chain", 10)


# ===================== ИЗИНГ И ALL-TO-ALL =====================

def test_ising_ring_matches_enumeration(rng):
    for _ in range(20):
        p = IsingParams(10, float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        assert_stats_close(ising_1d_stats(p.h, p.j, p.n_spins), enumerate_stats(build_ising_1d(p)))
        assert_spectra_equal(analytic_spectrum(p), enumerate_spectrum(build_ising_1d(p)))


def test_all_to_all_matches_enumeration(rng):
    for _ in range(20):
        p = AllToAllParams(8, float(rng.uniform(-2, 2)), float(rng.uniform(-1, 1)))
        assert_stats_close(analytic_stats(p), enumerate_stats(build_all_to_all(p)))
        assert_spectra_equal(all_to_all_spectrum(p.h, p.j, 8), enumerate_spectrum(build_all_to_all(p)))


def test_ksat_reference_curve():
    assert ksat_reference_curve(10) == pytest.approx(c_opt(32))
    with pytest.raises(DomainError):
        ksat_reference_curve(7)


# ===================== ГАМИЛЬТОНИАН =====================

def test_gauge_flip_preserves_spectrum(rng):
    hm = SpinHamiltonian.build(6, rng.normal(size=6), {e: float(rng.normal()) for e in [(0, 1), (1, 2), (2, 5), (3, 4)]})
    flipped = gauge_flip(gauge_flip(hm, 2), 4)
    assert_spectra_equal(enumerate_spectrum(hm), enumerate_spectrum(flipped))
    normalized, signs = gauge_normalize(hm)
    assert np.all(normalized.fields >= 0)
    assert signs == [i for i in range(6) if hm.fields[i] < 0]


def test_hamiltonian_validation():
    with pytest.raises(SpinThermoValidationError, match="вне топологии"):
        SpinHamiltonian.build(3, [0, 0, 0], {(0, 2): 1.0}, [(0, 1)])
    with pytest.raises(SpinThermoValidationError):
        SpinHamiltonian.build(3, [0, 0], {})
    with pytest.raises(SpinThermoValidationError, match="самодействие"):
        SpinHamiltonian.build(3, [0, 0, 0], {(1, 1): 1.0})
    with pytest.raises(SizeLimitError):
        SpinHamiltonian.zero(31, topology=[])


def test_energy_of_bits_uses_up_for_set_bits():
    hm = SpinHamiltonian.build(2, [1.0, -2.0], {(0, 1): 0.5})
    assert hm.energy_of_bits(0b01) == pytest.approx(1.0 + 2.0 - 0.5)
    assert hm.energy([-1, -1]) == pytest.approx(-1.0 + 2.0 + 0.5)


# ===================== CHIMERA =====================

def test_chimera_topology_edges():
    assert len(chimera_topology(1)) == 16
    assert len(chimera_topology(2)) == 36
    with pytest.raises(DomainError):
        chimera_topology(0)


def test_chimera_hub_layout_uses_existing_edges():
    topology = chimera_topology(2)
    layout = chimera_hub_layout(2)
    assert len(layout) == 4
    for hub, leaves in layout:
        assert len(leaves) == 3
        assert all(tuple(sorted((hub, leaf))) in topology for leaf in leaves)
    for (left, _), (right, _) in zip(layout, layout[1:]):
        assert tuple(sorted((left, right))) in topology


def test_embedded_star_chain_keeps_open_chain_spectrum():
    p = StarChainParams(4, 3, 3.5, 1.55, -1.6, open_chain=True)
    embedded = embed_star_chain_in_chimera(p)
    assert embedded.n_spins == 16
    assert_spectra_equal(enumerate_spectrum(embedded), star_chain_spectrum(p))
    with pytest.raises(DomainError):
        embed_star_chain_in_chimera(StarChainParams(4, 3, 1.0, 1.0, 1.0))


# ===================== ФАЙЛЫ МОДЕЛЕЙ =====================

def test_shipped_models_load(models_dir):
    for path in sorted(models_dir.glob("*.json")):
        model = load_model(path)
        hm = render_model(model)
        assert hm.n_spins >= 2


def test_model_file_round_trip(tmp_path):
    p = StarChainParams(2, 3, 1.964, 1.101, -1.191)
    path = save_model(p, tmp_path / "chain.json")
    assert load_model(path) == p
    assert json.loads(path.read_text())["schema_version"] == 1


def test_model_from_dict_rejects_bad_payloads():
    with pytest.raises(SpinThermoValidationError, match="неизвестные поля"):
        model_from_dict({"model": "star", "n_spins": 5, "a": 1.0, "b": 1.0, "c": 2.0})
    with pytest.raises(SpinThermoValidationError, match="отсутствуют поля"):
        model_from_dict({"model": "ising_1d", "n_spins": 5, "h": 1.0})
    with pytest.raises(SpinThermoValidationError, match="неизвестный тип"):
        model_from_dict({"model": "potts"})
    with pytest.raises(SpinThermoValidationError, match="schema_version"):
        model_from_dict({"model": "star", "schema_version": 7, "n_spins": 5, "a": 1.0, "b": 1.0})


def test_parse_topology_variants():
    assert len(parse_topology(None, 4)) == 6
    assert len(parse_topology("ring", 5)) == 5
    assert parse_topology("chimera:1", 8) == chimera_topology(1)
    assert parse_topology([[2, 0]], 3) == frozenset({(0, 2)})
    with pytest.raises(SpinThermoValidationError):
        parse_topology("torus", 4)
