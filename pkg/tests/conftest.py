import numpy as np
import pytest

from pointerlab import (PointerGrid, SystemState, gaussian_pointer, make_projector)

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance_log(request):
    """Record ``(criterion number, line)`` for the end-of-run summary."""
    store = request.config.stash[_ACCEPTANCE_KEY]

    def log(number, line):
        store[number] = line
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE_KEY, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        terminalreporter.write_line(store[number])


@pytest.fixture(scope="session")
def grid():
    return PointerGrid.centered(1.0)


@pytest.fixture(scope="session")
def gauss(grid):
    return gaussian_pointer(grid, 0.0, 1.0)


@pytest.fixture(scope="session")
def p0():
    """Projector onto the first basis vector of a qubit."""
    return make_projector([[1, 0]])


@pytest.fixture(scope="session")
def plus():
    return SystemState.from_vector([1, 1])


@pytest.fixture(scope="session")
def plus_i():
    return SystemState.from_vector([1, 1j])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
