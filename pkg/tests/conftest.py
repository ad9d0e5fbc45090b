import numpy as np
import pytest

from uavee import ScenarioConfig, make_scenario


@pytest.fixture(scope="session")
def config3():
    return ScenarioConfig(num_pairs=3, seed=7)


@pytest.fixture(scope="session")
def channels3(config3):
    return make_scenario(config3)[1]


@pytest.fixture(scope="session")
def config2():
    return ScenarioConfig(num_pairs=2, seed=7)


@pytest.fixture(scope="session")
def channels2(config2):
    return make_scenario(config2)[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
