import numpy as np
import pytest

from rubberfront.model import BoundaryDrive, InitialProfile, ModelParams


@pytest.fixture
def unit_params():
    return ModelParams(a0=1.0, alpha=1.0, beta=1.0, gamma=1.0, s0=1.0, T=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def const_drive(b, T=1.0):
    return BoundaryDrive.constant(b, T)


def const_profile(u, s0=1.0):
    return InitialProfile.constant(u, s0)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line per test; a test that errors before recording logs FAIL."""
    lines = request.config.stash[_ACCEPTANCE]
    number = request.node.name.split("_")[2]
    recorded = []

    def record(title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (f" [{detail}]" if detail else "")
        lines.append(line)
        recorded.append(line)
        print(line)
        assert ok, line

    yield record
    if not recorded:
        lines.append(f"FAIL criterion {number}: raised before its check ({request.node.name})")


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
