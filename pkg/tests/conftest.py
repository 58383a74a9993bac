import numpy as np
import pytest


@pytest.fixture
def rng():
    """Fresh seeded generator per test so ordering never matters."""
    return np.random.default_rng(20260816)
