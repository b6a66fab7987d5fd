import sys

import pytest
from hypothesis import settings

from tarry.corpus import corpus as _corpus

settings.register_profile("tarry", deadline=None, max_examples=200)
settings.load_profile("tarry")


@pytest.fixture(scope="session")
def corpus():
    return _corpus()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
