import numpy as np
import pytest

from prepblock.reports import FIXTURES, load_fixture


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=FIXTURES)
def fixture_design(request):
    return load_fixture(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
