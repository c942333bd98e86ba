from pathlib import Path

import pytest

from nckin.machine import table1_limits
from nckin.toolpath_io import load_point_table

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def limits():
    return table1_limits()


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def linear_blocks():
    return load_point_table((FIXTURES / "linear_path.txt").read_text())


@pytest.fixture(scope="session")
def circular_blocks():
    return load_point_table((FIXTURES / "circular_path.txt").read_text())


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
