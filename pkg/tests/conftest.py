import numpy as np
import pytest

from wavelab.core import GerstnerParams, PhysicalConstants
from wavelab.gerstner import GerstnerFlow


@pytest.fixture(scope="session")
def canon():
    """The canonical wave: k = 0.01, b0 = -10 m, h0 = 0."""
    return GerstnerParams.from_wavenumber(0.01, b0=-10.0, h0=0.0)


@pytest.fixture(scope="session")
def flow(canon):
    return GerstnerFlow(canon)


@pytest.fixture(scope="session")
def consts():
    return PhysicalConstants()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    """Criterion lines collected by the acceptance tests, printed in the summary."""
    log = []
    pytestconfig._acceptance_log = log
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if not log:
        return
    from wavelab import BACKEND

    terminalreporter.section(f"acceptance criteria (kernels: {BACKEND})")
    for line in sorted(log):
        terminalreporter.write_line(line[1])
