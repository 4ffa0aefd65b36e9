import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "shearlab", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("shearlab")

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_acceptance = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[n] = (report.outcome, report.duration, report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        outcome, duration, name = _acceptance[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  ({duration:.1f} s)  {name}")
