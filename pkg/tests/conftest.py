import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from floorprimes.primal import PrimeSieve  # noqa: E402


@pytest.fixture(scope="session")
def sieve_1e6():
    return PrimeSieve(10**6)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
