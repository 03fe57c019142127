import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from modalmu.repro import load_fixture  # noqa: E402

ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def fx():
    return load_fixture


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"AC{number:<2} {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
