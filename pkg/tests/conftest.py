import pytest
from hypothesis import settings

from funtf.cores import classify_cores
from funtf.pattern import parse_pattern

settings.register_profile("funtf", deadline=None, max_examples=60)
settings.load_profile("funtf")

EXAMPLE_TEXT = "00000\n11000\n11100"


@pytest.fixture
def example_pattern():
    return parse_pattern(EXAMPLE_TEXT)


@pytest.fixture(scope="session")
def n3_classification():
    """All seven three-row cores classified at r = 5, 6, plus their fiber runs."""
    fibers = []
    records = classify_cores(3, [5, 6], seed=0, sink=fibers)
    return records, fibers


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
