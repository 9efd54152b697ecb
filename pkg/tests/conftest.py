import os
import random

import pytest

from typeramsey import _accel


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=int(os.environ.get("TYPERAMSEY_TEST_SEED", "0")),
                     help="seed for randomized tests")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


@pytest.fixture(params=["numba", "numpy"])
def kernel_path(request, monkeypatch):
    """Run a test once per kernel implementation."""
    if request.param == "numba" and not _accel.USE_NUMBA:
        pytest.skip("numba disabled")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param
