import time

import numpy as np
import pytest

from minkforms.exterior import KVector, MetricAtPoint

ACCEPTANCE = pytest.StashKey[dict]()
STARTED = pytest.StashKey[float]()
SUITE_LIMIT_S = 60.0


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}
    config.stash[STARTED] = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    elapsed = time.perf_counter() - config.stash[STARTED]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        if n == 8:
            ok = ok and elapsed < SUITE_LIMIT_S
            detail = f"{detail}; session runtime {elapsed:.1f}s (limit {SUITE_LIMIT_S:.0f}s)"
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def acceptance(request):
    """Record ``(passed, detail)`` for a numbered criterion."""
    store = request.config.stash[ACCEPTANCE]

    def record(n, ok, detail):
        store[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


@pytest.fixture
def eta():
    return MetricAtPoint.minkowski()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def blade(*idx):
    return KVector.basis(*idx)
