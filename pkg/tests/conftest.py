import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number: int, passed: bool, text: str):
        _LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
        print(_LINES[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for key in sorted(_LINES):
            terminalreporter.write_line(_LINES[key])
