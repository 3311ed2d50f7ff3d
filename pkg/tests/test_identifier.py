# test_identifier.py

import numpy as np
import pytest

from wavelet_amp.dictionary import DictionarySpec, FamilySpec, build_dictionary
from wavelet_amp.identifier import AmpIdentifier, RegressorConfig, Safeguard, build_regressor, select_index
from wavelet_amp.matching_pursuit import SampledDictionary, decompose


def haar_dictionary(shifts):
    spec = DictionarySpec(families=(FamilySpec("haar", "scaling", shifts, 10.0 / shifts),))
    return build_dictionary(spec, regressor_dim=1)


def with_response(identifier, g):
    identifier.basis_response = lambda regressor: np.array(g, dtype=float)
    return identifier


@pytest.mark.unit
def test_build_regressor():
    config = RegressorConfig(p=2, q=1)
    assert build_regressor([0.5, 0.2], [0.1], config).tolist() == [0.5, 0.2, 0.1]
    assert build_regressor([], [], config).tolist() == [0.0, 0.0, 0.0]
    assert build_regressor([-1.0], [2.0, 3.0], RegressorConfig(p=1, q=2)).tolist() == [-1.0, 2.0, 3.0]


@pytest.mark.unit
def test_regressor_lags_must_be_positive():
    with pytest.raises(ValueError):
        RegressorConfig(p=0, q=1)


@pytest.mark.unit
def test_predict(example1_dictionary):
    identifier = AmpIdentifier(example1_dictionary)
    assert identifier.predict([0.3, -0.2, 0.7]) == 0.0

    identifier.theta[4] = 1.0
    regressor = [0.3, -0.2, 0.7]
    assert identifier.predict(regressor) == identifier.basis_response(regressor)[4]

    small = AmpIdentifier(haar_dictionary(3))
    small.theta[:] = [1.0, 2.0, 3.0]
    assert small.predict_from(np.array([0.2, -0.5, 1.0])) == pytest.approx(2.2, abs=1e-12)


@pytest.mark.unit
def test_select_index():
    assert select_index([0.5, -1.0, 0.7], 0.01) == (1, False)
    assert select_index([0.3, 0.3], 0.01) == (0, False)
    assert select_index([1e-9, -1e-9], 0.01) == (0, True)


@pytest.mark.unit
def test_update_interpolates_the_measurement():
    identifier = with_response(AmpIdentifier(haar_dictionary(2)), [0.5, 1.0])
    record = identifier.update([0.0], 2.0)
    assert record.selected_index == 1
    assert record.applied
    assert identifier.theta.tolist() == [0.0, 2.0]
    assert identifier.predict([0.0]) == 2.0


@pytest.mark.unit
def test_perfect_prediction_changes_nothing():
    identifier = with_response(AmpIdentifier(haar_dictionary(2)), [0.5, 1.0])
    identifier.theta[:] = [1.0, 1.5]
    record = identifier.update([0.0], 2.0)
    assert record.error_before == 0.0
    assert record.applied
    assert record.correlation == 1.0
    assert identifier.theta.tolist() == [1.0, 1.5]


@pytest.mark.unit
def test_skip_safeguard():
    identifier = with_response(AmpIdentifier(haar_dictionary(2), safeguard=Safeguard.SKIP), [1e-9, 5e-10])
    record = identifier.update([0.0], 1.0)
    assert not record.applied
    assert identifier.theta.tolist() == [0.0, 0.0]
    assert identifier.skipped == 1


@pytest.mark.unit
def test_clamp_safeguard():
    identifier = with_response(AmpIdentifier(haar_dictionary(2), epsilon=1e-2), [-1e-9, 5e-10])
    record = identifier.update([0.0], 1.0)
    assert record.applied and record.clamped
    assert identifier.theta[0] == pytest.approx(-100.0)
    assert identifier.theta[1] == 0.0


@pytest.mark.unit
def test_epsilon_must_be_positive(example1_dictionary):
    with pytest.raises(ValueError, match="epsilon"):
        AmpIdentifier(example1_dictionary, epsilon=0.0)


@pytest.mark.unit
def test_randomized_updates_interpolate_exactly(example1_dictionary):
    identifier = AmpIdentifier(example1_dictionary)
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(10_000):
        identifier.theta = rng.uniform(-1.0, 1.0, example1_dictionary.n)
        before = identifier.theta.copy()
        regressor = rng.uniform(-3.0, 3.0, 3)
        y = float(rng.uniform(-2.0, 2.0))
        record = identifier.update(regressor, y)

        changed = np.count_nonzero(identifier.theta != before)
        assert changed <= 1
        if record.applied and not record.clamped:
            assert abs(identifier.predict(regressor) - y) <= 1e-12 * max(1.0, abs(y))
            checked += 1
    assert checked > 9_000


@pytest.mark.unit
def test_disjoint_atoms_update_only_the_covering_atom():
    identifier = AmpIdentifier(haar_dictionary(5))
    regressor = [1.3]
    g = identifier.basis_response(regressor)
    assert np.count_nonzero(g) == 1

    record = identifier.update(regressor, 0.8)
    assert record.selected_index == int(np.flatnonzero(g)[0])
    assert np.count_nonzero(identifier.theta) == 1
    assert identifier.predict(regressor) == pytest.approx(0.8, abs=1e-12)


@pytest.mark.unit
def test_snapshot(example1_dictionary):
    identifier = AmpIdentifier(example1_dictionary)
    identifier.update([0.1, 0.2, 0.3], 0.5)
    snapshot = identifier.snapshot()
    assert snapshot["n"] == 30
    assert snapshot["updates"] == 1
    assert snapshot["safeguard"] == "clamp"
    assert snapshot["last_selected"] == identifier.last_selected
    assert len(snapshot["theta"]) == 30


@pytest.mark.unit
@pytest.mark.parametrize("regressor, y", [([0.3, -0.2, 0.7], 0.7), ([1.5, 0.4, -2.0], -1.25), ([0.0, 0.0, 0.0], 3.0)])
def test_constant_regressor_matches_one_point_pursuit(example1_dictionary, regressor, y):
    identifier = AmpIdentifier(example1_dictionary)
    g = identifier.basis_response(regressor)
    index, below = select_index(g, identifier.epsilon)
    assert not below

    # the induced problem: one sample, one unit-norm column sign(g_m)
    pursuit = decompose(np.array([y]), SampledDictionary(np.array([[np.sign(g[index])]])), max_iters=1)
    assert pursuit.picks[0][0] == 0
    coefficient = pursuit.picks[0][1]

    identifier.update(regressor, y)
    converged = identifier.theta.copy()
    assert converged[index] == pytest.approx(coefficient / abs(g[index]), rel=1e-12)
    assert np.count_nonzero(converged) == 1

    for _ in range(5):
        record = identifier.update(regressor, y)
        assert record.selected_index == index
        assert abs(record.error_before) <= 1e-12 * max(1.0, abs(y))
    np.testing.assert_allclose(identifier.theta, converged, rtol=0.0, atol=1e-12 * max(1.0, abs(y)))
