from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make  # noqa: E402

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture
def record():
    def _record(num: int, ok: bool, detail: str) -> None:
        ACCEPTANCE[num] = (ok, detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")

    return _record


@pytest.fixture
def h1():
    return make(3, 4, [((2,), (1, 1, 1)), ((3,), (1, 2, 2))])


@pytest.fixture
def h2():
    return make(3, 4, [((2, 3), (1, 1, 1))])


@pytest.fixture
def h3():
    return make(3, 4, [((1,), (2, 2, 2))])
