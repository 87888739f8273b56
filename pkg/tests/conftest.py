import os
import sys
from fractions import Fraction as F

import pytest
from hypothesis import settings

from cantorval.exactnum import QuadValue as Q
from cantorval.series import BlockPattern, MultiGeometric, geometric, mami_build

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SQRT2 = Q.sqrt(2)
Q57 = (Q.sqrt(57) - 5) / 16


def gn():
    return MultiGeometric((Q(3), Q(2)), Q(F(1, 4)))


def mg432(q):
    return MultiGeometric((Q(4), Q(3), Q(2)), Q.coerce(q))


def root2():
    return MultiGeometric((Q(1), 2 * SQRT2 - 2), (2 - SQRT2) / 2)


def gn_mami():
    return mami_build(BlockPattern.affine(2, 0, 1), Q(F(3, 4)))


def mami_3n():
    return mami_build(BlockPattern.affine(3, 0, 1), Q(F(1, 2)))


# the certified series named by the acceptance criteria
CERTIFIED = {
    "gn": gn,
    "q1_8": lambda: mg432(F(1, 8)),
    "q1_6": lambda: mg432(F(1, 6)),
    "q17_100": lambda: mg432(F(17, 100)),
    "q57": lambda: mg432(Q57),
    "root2": root2,
}

ORACLE_SERIES = {
    "gn": gn,
    "q1_8": lambda: mg432(F(1, 8)),
    "q1_6": lambda: mg432(F(1, 6)),
    "q57": lambda: mg432(Q57),
    "root2": root2,
}


@pytest.fixture
def halves():
    return geometric(F(1, 2))


@pytest.fixture
def thirds():
    return geometric(F(1, 3))


# -- acceptance report -----------------------------------------------------

_CRITERIA: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, secs = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title} ({secs:.2f}s)")
