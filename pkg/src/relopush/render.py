"""SVG drawings of rearrangement plans."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .geometry import footprint_at
from .planner import APPROACH, PRERELOCATE, PUSH, REMOVE_BLOCKER, RearrangementPlan
from .scenario import Scenario

PX_PER_M = 100.0
MARGIN_PX = 10.0
STYLES = {
    APPROACH: {"stroke": "#808080", "stroke-width": "1.5"},
    PUSH: {"stroke": "#f2c500", "stroke-width": "3"},
    PRERELOCATE: {"stroke": "#e07000", "stroke-width": "3", "stroke-dasharray": "6,3"},
    REMOVE_BLOCKER: {"stroke": "#8040c0", "stroke-width": "3", "stroke-dasharray": "2,3"},
}
SAMPLE_STEP = 0.02


class _Canvas:
    def __init__(self, scenario: Scenario):
        w = scenario.workspace
        self.x0, self.y0, self.x1, self.y1 = w.bounds
        width = (self.x1 - self.x0) * PX_PER_M + 2 * MARGIN_PX
        height = (self.y1 - self.y0) * PX_PER_M + 2 * MARGIN_PX
        self.root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", version="1.1",
                               width=f"{width:.0f}", height=f"{height:.0f}",
                               viewBox=f"0 0 {width:.0f} {height:.0f}")

    def px(self, x: float, y: float) -> str:
        # SVG y grows downward
        return f"{MARGIN_PX + (x - self.x0) * PX_PER_M:.2f},{MARGIN_PX + (self.y1 - y) * PX_PER_M:.2f}"

    def polygon(self, pts, **attrs):
        ET.SubElement(self.root, "polygon", points=" ".join(self.px(*p) for p in pts), **attrs)

    def polyline(self, pts, **attrs):
        ET.SubElement(self.root, "polyline", points=" ".join(self.px(*p) for p in pts), fill="none", **attrs)


def render_svg(plan: RearrangementPlan | None, scenario: Scenario) -> str:
    """SVG text at 100 px per metre.

    Start footprints are solid grey, goals dashed outlines. Each subtask is one
    polyline: approaches grey, pushes yellow, prerelocations dashed orange and
    blocker removals dotted purple.
    """
    c = _Canvas(scenario)
    c.polygon([(c.x0, c.y0), (c.x1, c.y0), (c.x1, c.y1), (c.x0, c.y1)],
              fill="white", stroke="black", **{"stroke-width": "2", "class": "workspace"})
    for o in scenario.objects:
        c.polygon(footprint_at(o.footprint, o.goal), fill="none", stroke="#2060c0",
                  **{"stroke-dasharray": "4,2", "class": "goal", "data-object": str(o.id)})
        c.polygon(footprint_at(o.footprint, o.start), fill="#b0b0b0", stroke="black",
                  **{"class": "start", "data-object": str(o.id)})
    start = plan.robot_start if plan is not None else scenario.robot_start
    c.polygon(footprint_at(scenario.car.body_footprint, start), fill="none", stroke="black",
              **{"class": "robot"})
    if plan is not None:
        for sub in plan.subtasks:
            if sub.path.length <= 0.0:
                continue
            pts = sub.path.sample_array(SAMPLE_STEP)[:, :2]
            c.polyline(pts, **STYLES[sub.kind], **{"class": sub.kind})
    ET.indent(c.root)
    return ET.tostring(c.root, encoding="unicode") + "\n"


def render(plan: RearrangementPlan | None, scenario: Scenario, out) -> None:
    with open(out, "w") as f:
        f.write(render_svg(plan, scenario))
