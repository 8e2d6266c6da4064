import numpy as np
import pytest

from cubedec.torus import build_torus


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[(1, 3), (2, 3), (3, 3)], ids=lambda p: f"T{p[0]}_{p[1]}")
def small_torus(request):
    return build_torus(*request.param)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
