import pytest

_ACCEPTANCE = {}


@pytest.fixture
def detail(request):
    """Dict of measured values shown next to the criterion's pass/fail line."""
    request.node.detail = {}
    return request.node.detail


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, name = marker.args
    _ACCEPTANCE[number] = (name, rep.passed, rep.duration, getattr(item, "detail", {}))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, passed, duration, info = _ACCEPTANCE[number]
        extra = ", ".join(f"{k}={v}" for k, v in info.items())
        tr.write_line(f"criterion {number} [{'PASS' if passed else 'FAIL'}] {name} "
                      f"({duration:.1f}s){': ' + extra if extra else ''}")
