"""Rearrangement problem instances and their JSON file format."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import Footprint, ObjectSpec, Pose2D, Workspace, collides, footprint_at, within_bounds
from .robot import CarModel, pushable_sides

BUNDLED = ("m3", "m4", "m5", "m6", "m8")


class ScenarioError(ValueError):
    """Malformed or invalid scenario; ``field`` is a dotted path into the document."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        self.message = message
        self.field = field
        self.line = line
        where = field
        if line is not None:
            where = f"{where} (line {line})" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class Scenario:
    workspace: Workspace
    car: CarModel
    robot_start: Pose2D
    objects: tuple[ObjectSpec, ...]
    name: str = ""
    shapes: dict = field(default_factory=dict, compare=False, repr=False)  # id -> "side" value when square

    def object(self, oid: int) -> ObjectSpec:
        for o in self.objects:
            if o.id == oid:
                return o
        raise KeyError(oid)

    def with_objects(self, objects) -> "Scenario":
        return replace(self, objects=tuple(objects))

    @property
    def m(self) -> int:
        return len(self.objects)


def validate(sc: Scenario) -> None:
    """Raise ScenarioError if the instance breaks a geometric precondition."""
    w = sc.workspace
    seen = set()
    for i, o in enumerate(sc.objects):
        path = f"objects[{i}]"
        if o.id in seen:
            raise ScenarioError(f"duplicate object id {o.id}", f"{path}.id")
        seen.add(o.id)
        if not pushable_sides(sc.car, o.footprint):
            raise ScenarioError(f"object {o.id} has no face as wide as the bumper", path)
        for key, pose in (("start_pose", o.start), ("goal_pose", o.goal)):
            if not within_bounds(footprint_at(o.footprint, pose), w):
                raise ScenarioError(f"object {o.id} {key} lies outside the workspace", f"{path}.{key}")
    for key, attr in (("start_pose", "start"), ("goal_pose", "goal")):
        polys = [footprint_at(o.footprint, getattr(o, attr)) for o in sc.objects]
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if collides(polys[i], polys[j]):
                    raise ScenarioError(f"objects {sc.objects[i].id} and {sc.objects[j].id} overlap at {key}",
                                        f"objects[{j}].{key}")
    robot = footprint_at(sc.car.body_footprint, sc.robot_start)
    if not within_bounds(robot, w):
        raise ScenarioError("robot start lies outside the workspace", "robot.start_pose")
    for o in sc.objects:
        if collides(robot, footprint_at(o.footprint, o.start)):
            raise ScenarioError(f"robot start overlaps object {o.id}", "robot.start_pose")


def _pose(v, path: str) -> Pose2D:
    if not (isinstance(v, (list, tuple)) and len(v) == 3
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        raise ScenarioError("expected [x, y, theta]", path)
    if not all(math.isfinite(c) for c in v):
        raise ScenarioError("pose values must be finite", path)
    return Pose2D(float(v[0]), float(v[1]), float(v[2]))


def _num(d: dict, key: str, path: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ScenarioError("missing field", f"{path}.{key}" if path else key)
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError("expected a finite number", f"{path}.{key}" if path else key)
    return float(v)


def _section(d: dict, key: str) -> dict:
    v = d.get(key)
    if not isinstance(v, dict):
        raise ScenarioError("missing or not an object", key)
    return v


def from_dict(doc: dict, name: str = "") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object")
    ws = _section(doc, "workspace")
    dims = [_num(ws, "width", "workspace"), _num(ws, "height", "workspace"),
            _num(ws, "grid_resolution", "workspace", 0.1)]
    try:
        workspace = Workspace(dims[0], dims[1], grid_resolution=dims[2])
    except ValueError as e:
        raise ScenarioError(str(e), "workspace") from None
    rb = _section(doc, "robot")
    dims = {k: _num(rb, k, "robot") for k in ("wheelbase", "length", "width", "bumper_width")}
    rho = _num(doc, "rho_push", "")
    try:
        car = CarModel(rho_push=rho, **dims)
    except ValueError as e:
        raise ScenarioError(str(e), "robot") from None
    start = _pose(rb.get("start_pose"), "robot.start_pose")
    objs = doc.get("objects", [])
    if not isinstance(objs, list):
        raise ScenarioError("expected a list", "objects")
    objects, shapes = [], {}
    for i, od in enumerate(objs):
        path = f"objects[{i}]"
        if not isinstance(od, dict):
            raise ScenarioError("expected an object", path)
        oid = od.get("id")
        if isinstance(oid, bool) or not isinstance(oid, int):
            raise ScenarioError("expected an integer id", f"{path}.id")
        try:
            if "side" in od:
                side = _num(od, "side", path)
                fp = Footprint.square(side)
                shapes[oid] = side
            elif "vertices" in od:
                fp = Footprint(np.asarray(od["vertices"], dtype=float))
            else:
                raise ScenarioError("needs either 'side' or 'vertices'", path)
        except ScenarioError:
            raise
        except (ValueError, TypeError) as e:
            raise ScenarioError(f"object {oid}: {e}", path) from None
        objects.append(ObjectSpec(oid, fp, _pose(od.get("start_pose"), f"{path}.start_pose"),
                                  _pose(od.get("goal_pose"), f"{path}.goal_pose"),
                                  _num(od, "mass", path, 0.44)))
    sc = Scenario(workspace, car, start, tuple(objects), name, shapes)
    validate(sc)
    return sc


def to_dict(sc: Scenario) -> dict:
    w, car = sc.workspace, sc.car
    objs = []
    for o in sc.objects:
        d: dict = {"id": o.id}
        if o.id in sc.shapes:
            d["side"] = sc.shapes[o.id]
        else:
            d["vertices"] = o.footprint.vertices.tolist()
        d["start_pose"] = list(o.start.as_tuple())
        d["goal_pose"] = list(o.goal.as_tuple())
        d["mass"] = o.mass
        objs.append(d)
    return {
        "workspace": {"width": w.width, "height": w.height, "grid_resolution": w.grid_resolution},
        "rho_push": car.rho_push,
        "robot": {"wheelbase": car.wheelbase, "length": car.length, "width": car.width,
                  "bumper_width": car.bumper_width, "start_pose": list(sc.robot_start.as_tuple())},
        "objects": objs,
    }


def _line_of(text: str, field: str) -> int | None:
    """Best-effort source line of a field path such as ``objects[2].start_pose``."""
    m = re.match(r"objects\[(\d+)\](?:\.(\w+))?", field)
    if not m:
        key = field.split(".")[-1] if field else ""
        hit = re.search(rf'"{re.escape(key)}"\s*:', text) if key else None
        return text.count("\n", 0, hit.start()) + 1 if hit else None
    idx, key = int(m.group(1)), m.group(2) or "id"
    hits = list(re.finditer(r'"id"\s*:', text))
    if idx >= len(hits):
        return None
    start = hits[idx].start()
    end = hits[idx + 1].start() if idx + 1 < len(hits) else len(text)
    hit = re.search(rf'"{re.escape(key)}"\s*:', text[start:end]) or hits[idx]
    pos = start + hit.start() if hit is not hits[idx] else start
    return text.count("\n", 0, pos) + 1


def loads(text: str, name: str = "") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"parse error: {e.msg} (column {e.colno})", line=e.lineno) from None
    try:
        return from_dict(doc, name)
    except ScenarioError as e:
        if e.line is not None:
            raise
        raise ScenarioError(e.message, e.field, _line_of(text, e.field)) from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from None
    return loads(text, path.stem)


def dumps(sc: Scenario) -> str:
    text = json.dumps(to_dict(sc), indent=2)
    # keep innermost number lists (poses, vertices) on one line
    return re.sub(r"\[\s*([^\[\]{}]*?)\s*\]",
                  lambda m: "[" + ", ".join(v.strip() for v in m.group(1).split(",")) + "]", text) + "\n"


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(dumps(sc))


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("relopush") / "scenarios" / f"{name}.scenario"))


def bundled(name: str) -> Scenario:
    return load_scenario(bundled_path(name))


def resolve(name_or_path: str) -> Scenario:
    """Load a scenario file, or a bundled scenario by bare name (e.g. ``m4``)."""
    p = Path(name_or_path)
    if not p.exists() and name_or_path in BUNDLED:
        p = bundled_path(name_or_path)
    return load_scenario(p)
