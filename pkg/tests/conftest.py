import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA: dict = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    def record(num: int, title: str):
        CRITERIA[num] = (title, "FAIL")
        request.node._criterion = num
    yield record
    num = getattr(request.node, "_criterion", None)
    rep = getattr(request.node, "rep_call", None)
    if num is not None and rep is not None and rep.passed:
        CRITERIA[num] = (CRITERIA[num][0], "PASS")


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        title, verdict = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {verdict}  {title}")
