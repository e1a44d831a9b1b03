import numpy as np
import pytest

from cfmasim.gf2_codes import ParityCheckMatrix

SMALL_H = np.array([
    [1, 0, 0, 0, 0, 1, 1, 1],
    [0, 1, 0, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 0, 1],
    [0, 0, 0, 1, 1, 1, 1, 0],
], dtype=np.uint8)


@pytest.fixture
def small_h():
    return ParityCheckMatrix.from_dense(SMALL_H)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
