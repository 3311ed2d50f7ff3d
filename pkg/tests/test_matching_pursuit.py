# test_matching_pursuit.py

import numpy as np
import pytest

from wavelet_amp.matching_pursuit import SampledDictionary, decompose, reconstruct


@pytest.fixture(scope="module")
def random_dictionary():
    rng = np.random.default_rng(2024)
    return SampledDictionary.normalized(rng.normal(size=(16, 32)))


@pytest.mark.unit
def test_single_atom_signal():
    dictionary = SampledDictionary(np.eye(6))
    result = decompose(2.5 * dictionary.column(3), dictionary, max_iters=10)
    assert result.picks == [(3, 2.5)]
    assert result.residual_norms[-1] <= 1e-12


@pytest.mark.unit
def test_orthonormal_pair_picks_largest_first():
    dictionary = SampledDictionary(np.eye(2))
    result = decompose([3.0, 4.0], dictionary, max_iters=10)
    assert result.picks == [(1, 4.0), (0, 3.0)]
    assert np.linalg.norm(result.residual) == 0.0
    np.testing.assert_allclose(reconstruct(result, dictionary), [3.0, 4.0], atol=1e-12)


@pytest.mark.unit
def test_ties_pick_the_lowest_index():
    dictionary = SampledDictionary(np.eye(3))
    result = decompose([1.0, 1.0, 0.0], dictionary, max_iters=1)
    assert result.picks == [(0, 1.0)]


@pytest.mark.unit
def test_energy_is_conserved(random_dictionary):
    rng = np.random.default_rng(99)
    for _ in range(100):
        f = rng.normal(size=16)
        result = decompose(f, random_dictionary, max_iters=25)
        energy = float(f @ f)
        coefficients = sum(c * c for _, c in result.picks)
        residual = float(result.residual @ result.residual)
        assert abs(energy - coefficients - residual) <= 1e-10 * energy
        assert len(result.picks) <= 25
        norms = result.residual_norms
        assert all(later <= earlier + 1e-12 for earlier, later in zip(norms, norms[1:]))


@pytest.mark.unit
def test_reconstruction_plus_residual_is_the_signal(random_dictionary):
    f = np.random.default_rng(5).normal(size=16)
    result = decompose(f, random_dictionary, max_iters=40)
    np.testing.assert_allclose(reconstruct(result, random_dictionary) + result.residual, f, atol=1e-10)


@pytest.mark.unit
def test_tolerance_stops_early(random_dictionary):
    f = np.random.default_rng(11).normal(size=16)
    full = decompose(f, random_dictionary, max_iters=200)
    tol = full.residual_norms[10]
    early = decompose(f, random_dictionary, max_iters=200, tol=tol)
    assert len(early.picks) == 11


@pytest.mark.unit
def test_reconstruct_trivial_cases():
    dictionary = SampledDictionary(np.eye(4))
    empty = decompose(np.zeros(4), dictionary, max_iters=3)
    assert empty.picks == []
    assert np.array_equal(reconstruct(empty, dictionary), np.zeros(4))

    empty.picks = [(0, 1.0)]
    assert np.array_equal(reconstruct(empty, dictionary), dictionary.column(0))

    empty.picks = [(4, 1.0)]
    with pytest.raises(ValueError, match="out of range"):
        reconstruct(empty, dictionary)


@pytest.mark.unit
def test_invalid_inputs():
    with pytest.raises(ValueError, match="column 1"):
        SampledDictionary([[1.0, 2.0], [0.0, 0.0]])
    dictionary = SampledDictionary(np.eye(3))
    with pytest.raises(ValueError, match="Dimension mismatch"):
        decompose([1.0, 2.0], dictionary, max_iters=1)
    with pytest.raises(ValueError, match="max_iters"):
        decompose([1.0, 2.0, 3.0], dictionary, max_iters=0)
