import sys

import numpy as np
import pytest

from bohrfact.trigpoly import TrigPoly1, TrigPoly2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def five_four_cos():
    return TrigPoly1({-1: 2, 0: 5, 1: 2})


@pytest.fixture
def five_four_cos_y():
    return TrigPoly2({(0, -1): 2, (0, 0): 5, (0, 1): 2})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
