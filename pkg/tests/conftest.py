import os

import pytest
from hypothesis import HealthCheck, settings

from bsseries.market import MarketParams

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def table1_params():
    return MarketParams(3800.0, 4000.0, 0.01, 0.2, 1.0)


@pytest.fixture
def table2_params():
    return MarketParams(3800.0, 4000.0, 0.01, 0.2, 5.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
