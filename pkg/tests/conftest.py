import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

P = 4611686018427387847  # largest prime below 2**62 in the table


@pytest.fixture
def rng():
    return random.Random(20240601)


def random_int_matrix(rnd, rows, cols, density=0.5, lo=-3, hi=3):
    from koszulrank.sparse import SparseMatrix
    ent = {}
    for i in range(rows):
        for j in range(cols):
            if rnd.random() < density:
                ent[(i, j)] = rnd.randint(lo, hi)
    return SparseMatrix(rows, cols, ent)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Report one acceptance criterion: call ``criterion(ok, detail)`` once."""
    capman = request.config.pluginmanager.getplugin("capturemanager")
    name = request.node.name

    def report(ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
