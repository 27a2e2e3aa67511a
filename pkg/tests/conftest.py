import numpy as np
import pytest


class UnitRandom:
    """Stands in for a Generator when every uniform draw must be 1."""

    def random(self, shape):
        return np.ones(shape)


@pytest.fixture
def unit_rng():
    return UnitRandom()
