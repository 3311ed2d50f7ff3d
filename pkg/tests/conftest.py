# conftest.py

import pytest

from wavelet_amp.config import example_config
from wavelet_amp.dictionary import build_dictionary
from wavelet_amp.simulation import TraceRow
from wavelet_amp.wavelets import Family, Kind, cascade_tabulate, load_filter


@pytest.fixture(scope="session")
def haar_shape():
    return cascade_tabulate(load_filter(Family.HAAR, Kind.SCALING), 10)


@pytest.fixture(scope="session")
def example1_dictionary():
    config = example_config("example1")
    return build_dictionary(config.dictionary, regressor_dim=config.regressor.dimension)


@pytest.fixture(scope="session")
def example2_dictionary():
    config = example_config("example2")
    return build_dictionary(config.dictionary, regressor_dim=config.regressor.dimension)


@pytest.fixture
def make_row():
    def _make_row(k=0, t=0.0, e=0.0, eta=0.0, u=0.0, y=0.0, ym=0.0, applied=True):
        return TraceRow(
            k=k, t=t, r=0.0, ym=ym, y=y, u=u, f_true=0.0, f_hat=0.0,
            eta=eta, e=e, selected_index=0, a=1.0, applied=applied,
        )

    return _make_row
