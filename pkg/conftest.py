import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size Monte Carlo runs (deselect with -m 'not slow')")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
