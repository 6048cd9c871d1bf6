import csv
import math
import xml.etree.ElementTree as ET

import pytest

from conftest import make_scenario
from relopush.cli import EXIT_INPUT, EXIT_OK, EXIT_PLAN_FAILED, main
from relopush.geometry import Pose2D
from relopush.paths import straight
from relopush.planner import APPROACH, PUSH, RearrangementPlan, Subtask, plan
from relopush.render import STYLES, render_svg
from relopush.scenario import bundled, save_scenario

NS = {"s": "http://www.w3.org/2000/svg"}
YELLOW = STYLES[PUSH]["stroke"]


def polylines(svg):
    return ET.fromstring(svg).findall("s:polyline", NS)


def test_render_empty_plan():
    sc = bundled("m3")
    root = ET.fromstring(render_svg(None, sc))
    assert root.findall("s:polyline", NS) == []
    classes = [p.get("class") for p in root.findall("s:polygon", NS)]
    assert classes.count("workspace") == 1
    assert classes.count("start") == 3 and classes.count("goal") == 3
    assert root.get("width") == "420" and root.get("height") == "540"


def test_render_single_push_has_one_yellow_line():
    sc = make_scenario([((2.0, 1.5, 0.0), (2.0, 3.5, 0.0))], robot=(2.0, 0.08, math.pi / 2))
    contact = Pose2D(2.0, 1.5 - 0.075 - sc.car.front, math.pi / 2)
    p = RearrangementPlan((Subtask(APPROACH, 1, straight(sc.robot_start, contact.y - sc.robot_start.y)),
                           Subtask(PUSH, 1, straight(contact, 2.0))), (1,), sc.robot_start)
    lines = polylines(render_svg(p, sc))
    assert [line.get("stroke") for line in lines].count(YELLOW) == 1
    push = next(line for line in lines if line.get("stroke") == YELLOW)
    pts = [tuple(map(float, q.split(","))) for q in push.get("points").split()]
    # x = 2 m -> 210 px; y flipped so the push runs upward on screen
    assert all(x == pytest.approx(210.0) for x, _ in pts)
    assert pts[0][1] > pts[-1][1]
    assert pts[0][1] - pts[-1][1] == pytest.approx(200.0)


def test_render_relopush_pushes_less_ink_than_npr_on_m6():
    # the graph-free baseline cannot solve m6, so the comparison uses npr
    sc = bundled("m6")

    def ink(algo):
        total = 0.0
        for line in polylines(render_svg(plan(sc, algo), sc)):
            if line.get("class") == APPROACH:
                continue
            pts = [tuple(map(float, q.split(","))) for q in line.get("points").split()]
            total += sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))
        return total

    assert ink("relopush") < ink("npr")


def test_cli_plan(tmp_path, capsys):
    out = tmp_path / "m3.svg"
    assert main(["plan", "m3", "--render", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "order:" in text and "L_p=" in text
    assert ET.parse(out).getroot().tag.endswith("svg")


def test_cli_plan_failure_exit_code(capsys):
    assert main(["plan", "m6", "--algo", "mp"]) == EXIT_PLAN_FAILED
    assert "no plan found" in capsys.readouterr().err


def test_cli_input_errors(tmp_path, capsys):
    assert main(["plan", str(tmp_path / "missing.scenario")]) == EXIT_INPUT
    bad = tmp_path / "bad.scenario"
    bad.write_text('{"workspace": 3}')
    assert main(["plan", str(bad)]) == EXIT_INPUT
    assert "workspace" in capsys.readouterr().err
    for argv in (["plan", "m3", "--algo", "astar"], ["bench", "m3", "--trials", "0", "--out", "x.csv"],
                 ["bench", "m3", "--jitter", "-1", "--out", "x.csv"], ["simulate", "m3", "--speed", "0"], []):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == EXIT_INPUT
    assert main(["plan", "m3", "--render", str(tmp_path / "no" / "dir.svg")]) == EXIT_INPUT


def test_cli_simulate(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    assert main(["simulate", "m3", "--trace", str(trace)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "T_e=" in text and text.count("position error") == 3
    rows = list(csv.reader(trace.open()))
    assert rows[0][:4] == ["t", "robot_x", "robot_y", "robot_theta"]


def test_cli_bench(tmp_path, capsys):
    sc = make_scenario([((1.0, 1.0, 0.0), (1.0, 2.0, 0.0))])
    path = tmp_path / "one.scenario"
    save_scenario(sc, path)
    out, fig = tmp_path / "r.csv", tmp_path / "r.png"
    assert main(["bench", str(path), "--algo", "relopush", "mp", "--trials", "3", "--out", str(out),
                 "--figure", str(fig)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert [r["algo"] for r in rows] == ["relopush", "mp"]
    assert all(r["S"] == "100.0000" and r["trials"] == "3" for r in rows)
    assert fig.stat().st_size > 0
