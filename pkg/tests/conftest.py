import numpy as np
import pytest

from fraclps.grid import BanachSpec, GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def grid1():
    return GridSpec(dim=1, n=128)


@pytest.fixture
def grid2():
    return GridSpec(dim=2, n=32)


@pytest.fixture
def scalar():
    return BanachSpec.scalar()


@pytest.fixture
def seq42():
    return BanachSpec.sequence(4, 2.0)
