import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hprates import make_model  # noqa: E402

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def model():
    return make_model(2, 3, 200)


@pytest.fixture(scope="session")
def model400():
    return make_model(2, 3, 400)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
