import numpy as np
import pytest

from nvhyper.hilbert import make_layout


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_photon_layout():
    return make_layout(("a", "b"), ("NV1",))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
