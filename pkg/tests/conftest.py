import random

import pytest

from pax.gen import TermGen, campaign_context
from pax.parser import spec_with


@pytest.fixture
def ctx():
    return campaign_context()


@pytest.fixture
def gen():
    return TermGen(random.Random(1234))


@pytest.fixture
def abc():
    """Actions a, b, c with gamma(a, b) = c; one variable v; bound 3."""
    return spec_with(actions=["a", "b", "c", ("d", 1), ("e", 1), ("f", 1)], variables=["v", "w"],
                     comm={("a", "b"): "c", ("d", "e"): "f"}, bound=3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
