import os
import sys
from fractions import Fraction as F

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from kmpmd.instances import Request, make_instance  # noqa: E402
from kmpmd.metrics import explicit_space, line_space  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def two_point():
    space = line_space([0, 1], 2)
    return make_instance(space, [Request(0, F(0), F(0)), Request(1, F(0), F(1))], "two-point")


def line_instance(k, items, gamma=1):
    space = line_space([p for _, p in items], k, gamma)
    return make_instance(space, [Request(i, F(t), F(p)) for i, (t, p) in enumerate(items)])


def explicit_instance(kind, dist, k, items, gamma=1):
    space = explicit_space(kind, [[F(x) for x in row] for row in dist], k, gamma)
    return make_instance(space, [Request(i, F(t), p) for i, (t, p) in enumerate(items)])


@pytest.fixture
def tp():
    return two_point()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
