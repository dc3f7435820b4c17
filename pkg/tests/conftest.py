import numpy as np
import pytest

from hvivr.problems import EquilibriumSelection, LinearlyConstrained


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def instances(nus=(1, 2, 3)):
    out = []
    for nu in nus:
        out.append(EquilibriumSelection(nu))
        out.append(LinearlyConstrained(nu))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
