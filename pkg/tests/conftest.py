import numpy as np
import pytest

import blockseg as bs


def symmetric_from(rng, n):
    """Random tie-free symmetric matrix with standard normal entries."""
    a = rng.standard_normal((n, n))
    return bs.SymMatrix.from_array(a + a.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
