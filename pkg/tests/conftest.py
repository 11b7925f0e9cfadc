import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def report_criterion():
    """Record one summary line per acceptance criterion."""

    def _record(key: str, passed: bool, detail: str):
        ACCEPTANCE_LINES[key] = f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("ab")), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
