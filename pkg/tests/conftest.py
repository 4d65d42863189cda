import os

import hypothesis
import pytest

from qzeno.qho import make_grid


hypothesis.settings.register_profile("default", max_examples=30, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def grid():
    return make_grid()


@pytest.fixture(scope="session")
def roomy_grid():
    # wide enough that levels up to n=10 at f=1 vanish at the edges
    return make_grid(512, 16.0)


@pytest.fixture
def acceptance_report():
    def report(number, name, passed, detail):
        ACCEPTANCE_LINES.append(
            f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name} -- {detail}")
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
