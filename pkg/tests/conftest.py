import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from relopush.geometry import Footprint, ObjectSpec, Pose2D, Workspace  # noqa: E402
from relopush.robot import CarModel  # noqa: E402
from relopush.scenario import Scenario, validate  # noqa: E402

CUBE = Footprint.square(0.15)
ARENA = Workspace(4.0, 5.2)


def make_scenario(pairs, robot=(2.0, 2.6, math.pi / 2), name="test", workspace=ARENA):
    """Scenario of 0.15 m cubes numbered 1.. from (start, goal) pose triples."""
    objs = [ObjectSpec(i + 1, CUBE, Pose2D(*s), Pose2D(*g)) for i, (s, g) in enumerate(pairs)]
    sc = Scenario(workspace, CarModel(), Pose2D(*robot), tuple(objs), name, {o.id: 0.15 for o in objs})
    validate(sc)
    return sc


# Object hugging the left wall whose goal sits just ahead and inward: every
# direct push needs a wide turn that leaves the workspace.
WALL_PAIRS = [((0.22, 1.5, 0.0), (0.4, 1.8, 0.0))]

# Object 1 has to travel up a column that object 3 sits in; object 2 is far away.
BLOCKER_PAIRS = [((1.3, 1.4, 0.0), (1.3, 2.8, 0.0)),
                 ((3.0, 4.2, 0.0), (3.2, 4.4, 0.0)),
                 ((1.3, 2.15, 0.0), (2.8, 3.4, 0.0))]

# Object 2 starts on top of object 1's goal, so one of them must move twice.
NON_MONOTONE_PAIRS = [((1.5, 2.0, 0.0), (2.0, 3.2, 0.0)),
                      ((2.0, 3.25, 0.0), (1.55, 2.05, 0.0))]
NON_MONOTONE_ROBOT = (3.0, 1.0, 1.57)


@pytest.fixture
def wall_scenario():
    return make_scenario(WALL_PAIRS, name="wall")


@pytest.fixture
def blocker_scenario():
    return make_scenario(BLOCKER_PAIRS, name="blocker")


@pytest.fixture
def non_monotone_scenario():
    return make_scenario(NON_MONOTONE_PAIRS, robot=NON_MONOTONE_ROBOT, name="swap")


# -- acceptance reporting ------------------------------------------------------
# Tests marked ``criterion(n, title)`` get one PASS/FAIL line in the terminal
# summary, with whatever measurements they put in the ``measured`` dict.

_VERDICTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.fixture
def measured(request):
    m = request.node.get_closest_marker("criterion")
    if m is None:
        return {}
    return _VERDICTS.setdefault(m.args[0], {"title": m.args[1], "ok": None, "measured": {}})["measured"]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or rep.when != "call" and not rep.failed:
        return
    v = _VERDICTS.setdefault(m.args[0], {"title": m.args[1], "ok": None, "measured": {}})
    v["ok"] = rep.passed if v["ok"] is None else v["ok"] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_VERDICTS):
        v = _VERDICTS[n]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[v["ok"]]
        detail = ", ".join(f"{k}={val}" for k, val in v["measured"].items())
        tr.write_line(f"criterion {n:2d} {status}  {v['title']}" + (f"  [{detail}]" if detail else ""))
