import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("flatfold", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("flatfold")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
