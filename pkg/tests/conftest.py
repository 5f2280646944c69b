from __future__ import annotations

import contextlib
import time

import pytest

from flagcert.designs import higman_sims_graph
from flagcert.flagcalc import bundled_certificate_path, load_certificate
from flagcert.graphs import enumerate_triangle_free

_CRITERIA: list[str] = []


@contextlib.contextmanager
def _record(label: str, limit: float | None = None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"FAIL  {label}  ({elapsed:.2f}s): {exc}"
        _CRITERIA.append(line)
        print(line)
        raise
    line = f"PASS  {label}  ({elapsed:.2f}s)"
    _CRITERIA.append(line)
    print(line)


@pytest.fixture
def criterion():
    return _record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus():
    """Triangle-free graphs by vertex count, n = 1..8."""
    return {n: enumerate_triangle_free(n) for n in range(1, 9)}


@pytest.fixture(scope="session")
def paper_cert():
    return load_certificate(bundled_certificate_path())


@pytest.fixture(scope="session")
def hs_graph():
    return higman_sims_graph()
