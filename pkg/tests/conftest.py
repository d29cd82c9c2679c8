import numpy as np
import pytest

from repgame.game import Distribution
from repgame.scenarios import (counter_example, normal_misspec_scenario,
                               product_choice)


@pytest.fixture(scope="session")
def pc06():
    """Two-signal scenario with rows Bern(0.6)/Bern(0.3), slice Bern(0.7)."""
    return product_choice(0.6, 0.3, 0.1)


@pytest.fixture(scope="session")
def game06(pc06):
    return pc06[0]


@pytest.fixture(scope="session")
def fw06(pc06):
    return pc06[1]


@pytest.fixture(scope="session")
def game09():
    """Rows Bern(0.9)/Bern(0.4); the instance all the hand-solved programs use."""
    return product_choice(0.9, 0.4, 0.05)[0]


@pytest.fixture(scope="session")
def ce():
    """Misspecified per-action kernels whose slice is attainable at x_eps = 0.55*7/6."""
    return counter_example(0.6, 0.3, 0.05, 0.55)


@pytest.fixture(scope="session")
def nm():
    return normal_misspec_scenario()


@pytest.fixture(scope="session")
def pure(game06):
    def make(label):
        if label in game06.actions_long:
            return Distribution.point_mass(game06.actions_long, label)
        return Distribution.point_mass(game06.actions_short, label)
    return make
