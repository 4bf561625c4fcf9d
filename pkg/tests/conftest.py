import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tm1.gpfa import load_gpfa
from tm1.machine import load_machine

FIX = os.path.join(os.path.dirname(__file__), "..", "src", "tm1", "fixtures")


def fx(name):
    return load_machine(os.path.join(FIX, name + ".tm"))


def pfa(name):
    return load_gpfa(os.path.join(FIX, name + ".gpfa"))


@pytest.fixture
def fixture_dir():
    return FIX


CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        ok = rep.passed and CRITERIA.get(n, (True, ""))[0]
        CRITERIA[n] = (ok, item.function.__doc__.strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, doc = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {doc}")
