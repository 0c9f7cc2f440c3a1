from __future__ import annotations

from functools import lru_cache

import pytest

from vertexposet.builders import build, parse
from vertexposet.oriented import orient

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def built(expr: str):
    return build(parse(expr))


@lru_cache(maxsize=None)
def oriented(expr: str):
    return orient(*built(expr))


@pytest.fixture
def op():
    return oriented


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
