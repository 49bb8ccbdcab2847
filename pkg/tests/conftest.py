import numpy as np
import pytest

from besovbilin.grid import GridSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def small_grid():
    return GridSpec(1, 64, 2.0)


@pytest.fixture
def mid_grid():
    return GridSpec(1, 1024, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
