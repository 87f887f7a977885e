import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One explicit verdict line per acceptance criterion."""
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.name.startswith("test_criterion_"):
        verdict = "PASS" if report.passed else "FAIL"
        sys.stdout.write(f"\n[acceptance] {item.name}: {verdict}\n")
