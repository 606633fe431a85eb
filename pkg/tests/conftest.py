import numpy as np
import pytest

from anderson2d import TorusGrid, AndersonOperator, sample_white_noise


@pytest.fixture(scope="session")
def grid8():
    return TorusGrid(8)


@pytest.fixture(scope="session")
def grid16():
    return TorusGrid(16)


@pytest.fixture(scope="session")
def op8(grid8):
    return AndersonOperator(grid8, sample_white_noise(grid8, 42))


@pytest.fixture(scope="session")
def op16_zero(grid16):
    return AndersonOperator(grid16, np.zeros((16, 16)))


@pytest.fixture(scope="session")
def op8_zero(grid8):
    return AndersonOperator(grid8, np.zeros((8, 8)))


def random_field(grid, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((grid.n, grid.n))
