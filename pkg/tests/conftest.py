"""Shared pytest hooks.

Tests marked ``@pytest.mark.criterion(n, "text")`` are collected into an
acceptance summary printed after the run, one line per criterion.
"""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _RESULTS.get(n, (text, "PASS"))[1]
    _RESULTS[n] = (text, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        text, status = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {text}")
