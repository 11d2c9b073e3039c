import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one acceptance line (printed in the summary) and assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        request.config.acceptance_lines.append(line)
        print(line)
        assert ok, line

    return record
