import math

import pytest
from hypothesis import settings

from conescatter.model import ScatteringParams, derive

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def flat():
    return ScatteringParams(1.0, 1.0, 0.0, 1.0, 1)


@pytest.fixture
def cone():
    return ScatteringParams(1.0, 1.0, 0.0, 1.2, 1)


@pytest.fixture
def rotating_cone():
    return ScatteringParams(1.0, 1.0, 0.005, 1.2, 1)


def eta_r_to_r(p, eta_r):
    return eta_r / derive(p).eta


TWO_PI = 2.0 * math.pi


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
