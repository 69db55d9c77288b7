import sys
from pathlib import Path

import pytest

from cssm import _kernels

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

MINI = TESTS.parent / "src" / "cssm" / "data" / "mini"
GOLDEN = TESTS / "golden"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def mini() -> Path:
    return MINI


@pytest.fixture(params=sorted(_kernels.IMPLEMENTATIONS))
def backend(request, monkeypatch):
    """Run a test once per kernel implementation."""
    window_scores, best_windows = _kernels.IMPLEMENTATIONS[request.param]
    monkeypatch.setattr(_kernels, "window_scores", window_scores)
    monkeypatch.setattr(_kernels, "best_windows", best_windows)
    return request.param


_criteria: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    ok = rep.passed
    prev = _criteria.get(number, (title, True))
    if rep.when == "call" or not ok:
        _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
