import pytest

import _report


def pytest_terminal_summary(terminalreporter):
    if not _report.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_report.LINES):
        terminalreporter.write_line(_report.LINES[key])


@pytest.fixture
def criterion():
    return _report.record
