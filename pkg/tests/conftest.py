import pytest

_RESULTS = []


@pytest.fixture
def report(request):
    """Record one acceptance line: ``report(ok, detail)``; the line is also printed."""

    def _record(ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}"
        _RESULTS.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)
