import numpy as np
import pytest

from dmtlink.dmt import DmtParams


@pytest.fixture
def params():
    return DmtParams()


def unit_qpsk(rng, shape):
    """Random unit-power QPSK values of the requested shape."""
    pts = (np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2))
    return pts[rng.integers(0, 4, size=shape)]
