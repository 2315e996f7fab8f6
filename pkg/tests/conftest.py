import numpy as np
import pytest

from fracsph.domain import build_domain


@pytest.fixture(scope="session")
def std_domain():
    # 401 particles on [0, 5], h = 1.1 s
    s = 5.0 / 400
    return build_domain(0.0, 5.0, 401, 1.1 * s)


@pytest.fixture(scope="session")
def unit_domain():
    s = 1.0 / 80
    return build_domain(0.0, 1.0, 81, 1.1 * s)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
