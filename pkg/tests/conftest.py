import numpy as np
import pytest

from softcone import ParameterSet


@pytest.fixture
def A():
    return ParameterSet(["a", "b"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
