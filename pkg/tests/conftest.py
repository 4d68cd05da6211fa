import numpy as np
import pytest

from asynciter.matrix_gen import SignConvention, SystemSpec

# the 2x2 running example: rho = sqrt(0.125)
F2 = np.array([[0.0, 0.5], [0.25, 0.0]])
D2 = np.array([1.0, 1.0])


@pytest.fixture
def small_system():
    return SystemSpec(F2.copy(), D2.copy(), SignConvention.PLUS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
