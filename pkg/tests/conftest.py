import time
from collections import defaultdict

import pytest
from hypothesis import settings

settings.register_profile("metspec", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("metspec")

_CRITERIA = defaultdict(list)
_TITLES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    number = marker.kwargs["criterion"]
    _TITLES[number] = marker.kwargs.get("title", "")
    _CRITERIA[number].append((item.name, report.passed, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(p for _, p, _ in parts)
        secs = sum(d for _, _, d in parts)
        failed = [name for name, p, _ in parts if not p]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        tr.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {_TITLES[number]} ({secs:.2f} s){extra}")


@pytest.fixture
def stopwatch():
    """Elapsed wall time since the fixture was requested."""
    start = time.perf_counter()
    return lambda: time.perf_counter() - start
