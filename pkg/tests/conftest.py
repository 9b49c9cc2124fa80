import os

import pytest
from hypothesis import HealthCheck, settings

os.environ.setdefault("TRAPPED_PAIR_THREADS", "1")

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE_LINES: dict[int, str] = {}


def format_acceptance(number: int, ok: bool, title: str, detail: str) -> str:
    return f"criterion {number:02d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.fixture
def acceptance_report():
    def record(number, ok, title, detail):
        _ACCEPTANCE_LINES[number] = format_acceptance(number, ok, title, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(_ACCEPTANCE_LINES[number])
