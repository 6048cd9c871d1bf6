"""Pushing poses, the push-traversability graph, and prerelocation search."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .dubins import OUT_OF_BOUNDS, DubinsPath, check_path, is_long, valid_dubins
from .geometry import ObjectSpec, Pose2D, Scene, Workspace, pose_error
from .paths import Trajectory, straight
from .robot import CarModel, contact_transform, push_direction, pushable_sides, pushing_body, pushing_pose
from .world import World

START, GOAL = "start", "goal"
PRERELO_STEP = 0.05
PRERELO_MAX = 1.5


class ObjectUnpushableError(ValueError):
    """No face of the object is wide enough for the bumper."""


@dataclass(frozen=True)
class PushingPose:
    object_id: int
    side: int
    role: str
    robot_pose: Pose2D
    push_direction: tuple[float, float]
    object_pose: Pose2D


@dataclass(frozen=True)
class Prerelocation:
    push_side: int            # face pushed during the straight pre-push
    displacement: float
    new_object_pose: Pose2D
    new_robot_pose: Pose2D    # the edge's starting pushing pose after the move
    prepush_path: Trajectory  # robot path of the pre-push


@dataclass(frozen=True)
class PTEdge:
    src: int
    dst: int
    weight: float
    push_path: DubinsPath
    prerelocation: Prerelocation | None = None


@dataclass
class PTGraph:
    vertices: list[PushingPose]
    edges: list[PTEdge]
    scene_version: int = 0
    out_edges: dict[int, list[PTEdge]] = field(init=False, repr=False)

    def __post_init__(self):
        self.out_edges = defaultdict(list)
        for e in self.edges:
            self.out_edges[e.src].append(e)

    def vertex_ids(self, object_id: int, role: str | None = None) -> list[int]:
        return [i for i, v in enumerate(self.vertices)
                if v.object_id == object_id and (role is None or v.role == role)]

    def edge(self, src: int, dst: int) -> PTEdge | None:
        for e in self.out_edges.get(src, ()):
            if e.dst == dst:
                return e
        return None


def gen_vertices(objects: Sequence[ObjectSpec], car: CarModel | None = None) -> list[PushingPose]:
    """K start-role and K goal-role pushing poses per object, in id order."""
    car = car or CarModel()
    out = []
    for obj in sorted(objects, key=lambda o: o.id):
        sides = pushable_sides(car, obj.footprint)
        if not sides:
            raise ObjectUnpushableError(f"object {obj.id} has no face wide enough for the bumper")
        for role, pose in ((START, obj.start), (GOAL, obj.goal)):
            for k in sides:
                out.append(PushingPose(obj.id, k, role, pushing_pose(car, obj.footprint, pose, k),
                                       push_direction(obj.footprint, pose, k), pose))
    return out


def _reaches_goal(car: CarModel, obj: ObjectSpec, src: PushingPose, dst: PushingPose) -> bool:
    """Pushing on ``src.side`` and stopping at ``dst`` leaves the object on its goal (up to symmetry)."""
    end = dst.robot_pose.compose(contact_transform(car, obj.footprint, src.side))
    dpos, dang = pose_error(obj.footprint, end, obj.goal)
    return dpos < 1e-6 and dang < 1e-6


def max_prepush(world: World, obj: ObjectSpec, side: int, step: float = PRERELO_STEP,
                limit: float = PRERELO_MAX) -> float:
    """Largest multiple of ``step`` the object can be pushed straight on ``side``."""
    car, w = world.car, world.workspace
    body = pushing_body(car, obj.footprint, side)
    scene = world.scene(exclude={obj.id})
    start = pushing_pose(car, obj.footprint, obj.start, side)
    best = 0.0
    for i in range(1, int(math.floor(limit / step + 1e-9)) + 1):
        if check_path(straight(start, i * step), body, scene, w, w.grid_resolution / 2.0) is not None:
            break
        best = i * step
    return best


def find_prerelo(v_s: PushingPose, v_g: PushingPose, w: Workspace, obstacles: Scene, rho: float,
                 car: CarModel, obj: ObjectSpec, *, prepush_reach: dict[int, float] | None = None,
                 world: World | None = None, step: float = PRERELO_STEP,
                 limit: float = PRERELO_MAX) -> Prerelocation | None:
    """Smallest straight pre-push making the push from ``v_s`` to ``v_g`` a valid Long path.

    Candidates are spaced ``step`` apart along each push direction of the object,
    out to ``limit``. ``prepush_reach`` maps side -> feasible pre-push distance
    (computed from ``world`` when omitted).
    """
    body = pushing_body(car, obj.footprint, v_s.side)
    direct, _ = valid_dubins(v_s.robot_pose, v_g.robot_pose, rho, w, obstacles, body)
    if direct is not None:
        return None
    if prepush_reach is None:
        prepush_reach = {j: max_prepush(world, obj, j, step, limit) for j in pushable_sides(car, obj.footprint)}
    return _scan_prerelo(v_s, v_g, w, obstacles, rho, car, obj, body, prepush_reach, step, limit)[0]


def _scan_prerelo(v_s, v_g, w, obstacles, rho, car, obj, body, prepush_reach, step, limit):
    """Candidate scan of find_prerelo once the direct push is known to fail."""
    if is_long(v_s.robot_pose, v_g.robot_pose, rho):
        return None, None
    sides = pushable_sides(car, obj.footprint)
    for i in range(1, int(math.floor(limit / step + 1e-9)) + 1):
        disp = i * step
        for j in sides:
            if prepush_reach.get(j, 0.0) < disp - 1e-9:
                continue
            ux, uy = push_direction(obj.footprint, obj.start, j)
            new_rp = v_s.robot_pose.translated(ux * disp, uy * disp)
            if not is_long(new_rp, v_g.robot_pose, rho):
                continue
            path, _ = valid_dubins(new_rp, v_g.robot_pose, rho, w, obstacles, body)
            if path is None:
                continue
            pre_start = pushing_pose(car, obj.footprint, obj.start, j)
            return Prerelocation(j, disp, obj.start.translated(ux * disp, uy * disp), new_rp,
                                 straight(pre_start, disp)), path
    return None, None


def gen_graph(objects: Sequence[ObjectSpec] | World, w: Workspace | None = None, rho: float | None = None,
              *, car: CarModel | None = None, prerelocate: bool = True, scene_version: int = 0,
              step: float = PRERELO_STEP, limit: float = PRERELO_MAX) -> PTGraph:
    """Build the push-traversability graph over the unplaced objects.

    Edges run from every start-role vertex to every vertex of another object and
    to the same object's goal-role vertices. Each edge's robot+object sweep is
    checked against all objects except the pushed one and the destination's owner.
    Out-of-bounds Short pushes get a prerelocation when ``prerelocate`` is set.
    """
    if isinstance(objects, World):
        world = objects
    else:
        world = World(w, car or CarModel(), {o.id: o for o in objects})
    w = world.workspace
    car = world.car
    rho = car.rho_push if rho is None else rho
    if not rho > 0:
        raise ValueError("rho must be positive")
    objs = world.objects
    vertices = gen_vertices(list(objs.values()), car) if objs else []
    edges: list[PTEdge] = []
    reach: dict[int, dict[int, float]] = {}
    for si, vs in enumerate(vertices):
        if vs.role == GOAL:
            continue
        a = objs[vs.object_id]
        body = pushing_body(car, a.footprint, vs.side)
        for gi, vg in enumerate(vertices):
            if vg.object_id == vs.object_id:
                if vg.role != GOAL or not _reaches_goal(car, a, vs, vg):
                    continue
            scene = world.scene(exclude={vs.object_id, vg.object_id})
            path, reason = valid_dubins(vs.robot_pose, vg.robot_pose, rho, w, scene, body)
            if path is not None:
                edges.append(PTEdge(si, gi, path.total_length, path))
                continue
            if reason != OUT_OF_BOUNDS or not prerelocate:
                continue
            if a.id not in reach:
                reach[a.id] = {j: max_prepush(world, a, j, step, limit)
                               for j in pushable_sides(car, a.footprint)}
            pre, new_path = _scan_prerelo(vs, vg, w, scene, rho, car, a, body, reach[a.id], step, limit)
            if pre is not None:
                edges.append(PTEdge(si, gi, new_path.total_length, new_path, pre))
    return PTGraph(vertices, edges, scene_version)
