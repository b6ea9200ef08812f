import numpy as np
import pytest

from spinbeats import experiments as ex

# Stand-in relaxation times for TMP/PTP; published values are unavailable.
TMP_TAU = 30.0
TMP_T2 = 40.0

ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def tmp_low():
    return ex.tmp("low", tau=TMP_TAU)


@pytest.fixture(scope="session")
def tmp_high():
    return ex.tmp("high", T2=TMP_T2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
