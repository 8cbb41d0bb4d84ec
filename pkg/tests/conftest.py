from pathlib import Path

import pytest

from rhythmform.score import parse_rhythm_json

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
MOZART = FIXTURES / "mozart_k331_theme.json"

_criteria = []


@pytest.fixture(scope="session")
def mozart_path():
    return MOZART


@pytest.fixture(scope="session")
def mozart():
    return parse_rhythm_json(MOZART.read_text())


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(name, passed, detail=""):
        _criteria.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
