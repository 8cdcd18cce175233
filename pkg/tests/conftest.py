import numpy as np
import pytest

from hamsim.numerics import SX, SY, SZ, kron

XX = kron(SX, SX)
YY = kron(SY, SY)
ZZ = kron(SZ, SZ)
ISO = (XX + YY + ZZ) / 3


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
