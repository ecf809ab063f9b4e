import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line; the lines are printed in the terminal summary."""

    def record(number: int, passed: bool, summary: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {summary}"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
