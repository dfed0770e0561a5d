import json

import pytest

from src.exceptions import SpinThermoValidationError
from src.thermo import MERGE_TOLERANCE, Spectrum


def test_from_energies_merges_within_tolerance():
    s = Spectrum.from_energies([1.0, 0.0, MERGE_TOLERANCE / 10, 1.0 + MERGE_TOLERANCE / 2])
    assert s.levels == [(0.0, 2), (1.0, 2)]
    assert s.total_dim == 4


def test_from_energies_sums_given_degeneracies():
    s = Spectrum.from_energies([2.0, 0.0, 2.0], [3, 1, 4])
    assert s.energies == (0.0, 2.0)
    assert s.degeneracies == (1, 7)


def test_degeneracies_are_arbitrary_precision():
    s = Spectrum((0.0, 1.0), (1, 2 ** 80))
    assert s.total_dim == 2 ** 80 + 1
    assert s.log_degeneracies()[1] == pytest.approx(80 * 0.6931471805599453)


@pytest.mark.parametrize("energies, degeneracies", [
    ((1.0, 0.0), (1, 1)),
    ((0.0, 0.0), (1, 1)),
    ((0.0, 1.0), (1, 0)),
    ((0.0, float("nan")), (1, 1)),
    ((), ()),
])
def test_invalid_spectra_rejected(energies, degeneracies):
    with pytest.raises(SpinThermoValidationError):
        Spectrum(energies, degeneracies)


def test_shifted_and_first_excited():
    s = Spectrum((-3.0, -1.0, 2.0), (1, 5, 2))
    shifted = s.shifted()
    assert shifted.energies == (0.0, 2.0, 5.0)
    assert shifted.first_excited_degeneracy == 5
    assert Spectrum((0.0,), (1,)).first_excited_degeneracy is None


def test_json_is_ground_shifted_pairs():
    s = Spectrum((1.0, 2.5), (1, 3))
    assert json.loads(s.to_json()) == [[0.0, 1], [1.5, 3]]
    assert Spectrum.from_json(s.to_json()).levels == [(0.0, 1), (1.5, 3)]


def test_from_json_rejects_garbage():
    with pytest.raises(SpinThermoValidationError, match="JSON"):
        Spectrum.from_json("{not json")
    with pytest.raises(SpinThermoValidationError, match="пара"):
        Spectrum.from_json("[[0.0, 1, 2]]")
