import sys

import pytest

from phsolve.grid import make_grid
from phsolve.model import make_model


@pytest.fixture(scope="session")
def harmonic():
    return make_model("harmonic_gauge")


@pytest.fixture(scope="session")
def morse():
    return make_model("morse")


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(-6.0, 6.0, 200)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
