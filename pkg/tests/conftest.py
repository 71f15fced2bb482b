import sys

import numpy as np
import pytest

from holobundle import liealg
from holobundle.torus import TorusGeometry


@pytest.fixture
def curve():
    """Skewed elliptic curve, grid of 13 points per direction."""
    return TorusGeometry(1, (0.3 + 1.1j,), 6)


@pytest.fixture
def surface():
    return TorusGeometry(2, (0.2 + 1.0j, -0.1 + 0.9j), 3)


@pytest.fixture
def sl2():
    return liealg.get_algebra("sl2")


@pytest.fixture
def gl1():
    return liealg.get_algebra("gl1")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
