import sys

import numpy as np
import pytest

from complexsusy.numerics import GridSpec


@pytest.fixture(scope="session")
def line2000():
    return GridSpec.line(10.0, 2000)


@pytest.fixture(scope="session")
def line4000():
    return GridSpec.line(10.0, 4000)


@pytest.fixture(scope="session")
def scatter_grid():
    return GridSpec.line(30.0, 4000)


@pytest.fixture(scope="session")
def half2000():
    return GridSpec.half_line(10.0, 2000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
