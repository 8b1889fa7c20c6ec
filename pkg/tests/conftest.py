import numpy as np
import pytest

from lpsasakian.structure import build_example3
from lpsasakian.submanifold import build_example3_leaf

DEFAULT_GRID = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.7, -1.3)]
SQUARE_GRID = [(a, b) for a in (-2.0, -1.0, 0.0, 1.0, 2.0) for b in (-2.0, -1.0, 0.0, 1.0, 2.0)]


@pytest.fixture(scope="session")
def ex3():
    return build_example3()


@pytest.fixture(scope="session")
def leaf():
    return build_example3_leaf()


@pytest.fixture
def origin():
    return np.zeros(3)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
