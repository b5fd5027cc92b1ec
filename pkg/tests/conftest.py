import numpy as np
import pytest

from fastdiff import derive_params


@pytest.fixture(scope="session")
def params_half():
    return derive_params(0.5)


@pytest.fixture(scope="session")
def params_for():
    cache = {}

    def get(m: float):
        if m not in cache:
            cache[m] = derive_params(m)
        return cache[m]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
