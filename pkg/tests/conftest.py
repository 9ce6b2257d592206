import math

import numpy as np
import pytest

from cventangle.grid import Axis
from cventangle.states import build_gaussian_product, build_tmsv

LN_2PIE = 1.0 + math.log(2 * math.pi)
LN_PIE = 1.0 + math.log(math.pi)


def gaussian_entropy(sigma):
    return 0.5 * math.log(2 * math.pi * math.e * sigma**2)


@pytest.fixture(scope="session")
def axis():
    return Axis.symmetric(24.0, 4097)


@pytest.fixture(scope="session")
def product_unit():
    return build_gaussian_product(1.0, 1.0)


@pytest.fixture(scope="session")
def tmsv_half():
    return build_tmsv(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(mod.line(number))
