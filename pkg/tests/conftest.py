import random
import warnings

import pytest

from grappa.graph import BUNDLED, bundled, random_stable_graph


@pytest.fixture(scope="session")
def graphs():
    return {name: bundled(name) for name in BUNDLED}


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def random_graphs():
    r = random.Random(2024)
    return [random_stable_graph(r) for _ in range(20)]


@pytest.fixture(autouse=True)
def _quiet_semistable():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="graph is semistable")
        yield
