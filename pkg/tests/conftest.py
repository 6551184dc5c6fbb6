import numpy as np
import pytest

from srm_benchmark.config import ScenarioConfig
from srm_benchmark.geometry.constraints import ConstraintSet, build_constraints
from srm_benchmark.scenarios.channel import ChannelRealization
from srm_benchmark.scenarios.dataset import generate_dataset


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long desk-scale checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def random_channel(rng, size=3, rate=0.3, p_max=1.0):
    """A random feasible channel with a dominant diagonal, gains around 1 and noise 0.01."""
    while True:
        gains = rng.uniform(0.01, 0.3, (size, size))
        np.fill_diagonal(gains, rng.uniform(0.8, 1.5, size))
        ch = ChannelRealization(gains=gains, gamma_min=np.full(size, 2.0**rate - 1.0), noise_power=0.01, p_max=p_max)
        cs = build_constraints(ch)
        if cs.feasible and cs.d_max_star > 1e-6:
            return ch, cs


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def identity_set():
    return ConstraintSet.from_matrices(np.eye(2), [0.5, 0.5], 1.0)


@pytest.fixture
def coupled_set():
    return ConstraintSet.from_matrices([[1.0, -0.5], [-0.5, 1.0]], [0.1, 0.1], 1.0)


@pytest.fixture(scope="session")
def small_config():
    return ScenarioConfig(rho_min=0.0, rho_max=3.0, rate="0.1", count=48, seed=7)


@pytest.fixture(scope="session")
def small_dataset(small_config):
    return generate_dataset(small_config)
