import numpy as np
import pytest

from acceptance_log import LINES


@pytest.fixture
def rng():
    return np.random.default_rng(20170828)


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(LINES):
            terminalreporter.write_line(line)
