import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_report():
    """One PASS/FAIL line per acceptance criterion, echoed in the summary."""
    def _report(num: int, ok: bool, detail: str) -> None:
        line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
        _acceptance_lines.append(line)
        print("\n" + line)
        assert ok, f"criterion {num}: {detail}"
    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
