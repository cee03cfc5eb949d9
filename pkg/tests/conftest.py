import sys
from pathlib import Path

import pytest

# make the oracle helpers importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """``criterion(cid, ok, detail)`` records one acceptance line and asserts ``ok``."""
    lines = request.config.stash[_LINES]

    def record(cid: str, ok: bool, detail: str):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {cid:<4} {detail}")
        assert ok, f"{cid}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
