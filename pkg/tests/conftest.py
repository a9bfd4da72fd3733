from pathlib import Path

import pytest

from condbound.serialize import load_fields

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fields_by_label():
    out = {}
    for path in sorted(FIXTURES.glob("*.jsonl")):
        for K in load_fields(path):
            out.setdefault(K.label, K)
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
