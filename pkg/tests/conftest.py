import math
import sys

import numpy as np
import pytest

from curvspec import builtin, default_catalog


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def unit_sphere():
    return builtin("sphere2", {"a": 1.0})


@pytest.fixture(scope="session")
def schwarzschild():
    return builtin("schwarzschild", {"rs": 2.0, "c": 1.0})


SCHW_POINT = np.array([0.0, 3.0, math.pi / 4, 0.0])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
