import random

import pytest

from flashgraph.graph import from_edges


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def two_triangles():
    return from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], directed=False)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record a named, timed acceptance check; the summary prints one line per check."""

    def record(name, ok, elapsed, limit):
        met = ok and elapsed < limit
        _ACCEPTANCE.append(f"{'PASS' if met else 'FAIL'}  {name}  ({elapsed:.2f}s, limit {limit}s)")
        return met

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
