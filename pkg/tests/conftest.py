import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# (number, passed, detail) lines filled by tests/test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def critical_values():
    return json.loads((DATA / "cb_critical_values.json").read_text())


@pytest.fixture()
def criterion():
    """Record one acceptance line; the test still asserts afterwards."""
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
