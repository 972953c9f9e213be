import pytest

_REPORT: dict = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the end-of-run report."""

    def record(number: int, ok: bool, detail: str = ""):
        _REPORT[number] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_REPORT):
        ok, detail = _REPORT[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
