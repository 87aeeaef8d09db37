from __future__ import annotations

import pytest

from calderon_lab.suite import run_suite

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def suite_run():
    """One in-process run of the acceptance suite, shared by every test that needs it."""
    return run_suite(7)


@pytest.fixture
def record_criterion():
    def record(k: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES[k] = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
