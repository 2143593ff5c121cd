import pytest

from utfsr import networks as nw
from utfsr.lti import FrequencyGrid
from utfsr.model import psd


def edges(*pairs):
    """1-based unordered pairs -> 0-based sorted edge set."""
    return frozenset(tuple(sorted((a - 1, b - 1))) for a, b in pairs)


@pytest.fixture(scope="session")
def grid():
    return FrequencyGrid(1024)


@pytest.fixture(scope="session")
def diamond_psd(grid):
    return psd(nw.diamond(), grid)


@pytest.fixture(scope="session")
def diamond_cancel_psd(grid):
    return psd(nw.diamond(2, 2, 2, -8), grid)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
