import sys

import pytest

from helpers import binomial_posterior


@pytest.fixture
def binom():
    return binomial_posterior()


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance criterion lines, which are otherwise captured."""
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "REPORT_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
