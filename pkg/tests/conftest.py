import sys

import numpy as np
import pytest

from twomode_jc.wigner import CouplingConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def equal_couplings():
    return CouplingConfig(1.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
