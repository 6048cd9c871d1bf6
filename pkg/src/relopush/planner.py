"""Greedy rearrangement sequencing over the push-traversability graph, plus two baseline planners."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .dubins import shortest_dubins
from .geometry import Pose2D, collides, footprint_at, pose_error, sweep_status
from .hybrid_astar import AStarConfig, MotionPath, UnreachableGoalError, hybrid_astar, merge_pieces
from .paths import Trajectory, concatenate, straight
from .ptgraph import GOAL, PRERELO_MAX, PRERELO_STEP, START, PTGraph, _reaches_goal, gen_graph, gen_vertices
from .robot import CarModel, contact_transform, pushing_body, pushing_pose
from .scenario import Scenario
from .search import GraphPath, PlanningLogicError, candidate_paths, plan_removal, sweep_polygons
from .world import DEFAULT_INFLATION, World

APPROACH, PRERELOCATE, REMOVE_BLOCKER, PUSH = "Approach", "Prerelocate", "RemoveBlocker", "Push"
RELOPUSH, NPR, MP = "relopush", "npr", "mp"
ALGORITHMS = (RELOPUSH, NPR, MP)
BACKOFF = 0.025  # straight move out of / into contact; just clears the default inflation
TIGHT_MARGIN = 0.002  # obstacle growth when squeezing past objects; also the re-check sample spacing


@dataclass(frozen=True)
class Subtask:
    kind: str
    object_id: int | None
    path: Trajectory

    @property
    def pushing(self) -> bool:
        return self.kind != APPROACH

    @property
    def length(self) -> float:
        return self.path.length


@dataclass(frozen=True)
class Round:
    object_id: int
    cost: float          # pushing cost of the chosen candidate
    rejected: tuple[float, ...]  # costs of cheaper-or-equal candidates that failed to expand


@dataclass(frozen=True)
class RearrangementPlan:
    subtasks: tuple[Subtask, ...]
    order: tuple[int, ...]
    robot_start: Pose2D
    final_poses: dict = field(default_factory=dict)
    rounds: tuple[Round, ...] = ()

    @property
    def N_pre(self) -> int:
        return sum(s.kind == PRERELOCATE for s in self.subtasks)

    @property
    def N_obs(self) -> int:
        return sum(s.kind == REMOVE_BLOCKER for s in self.subtasks)

    @property
    def L_p(self) -> float:
        return sum(s.length for s in self.subtasks if s.pushing)

    @property
    def L_t(self) -> float:
        return sum(s.length for s in self.subtasks)


@dataclass(frozen=True)
class PlannerConfig:
    astar: AStarConfig = AStarConfig()
    prerelo_step: float = PRERELO_STEP
    prerelo_max: float = PRERELO_MAX
    inflation: float = DEFAULT_INFLATION
    pos_tol: float = 0.05
    ang_tol: float = 0.1


@dataclass(frozen=True)
class _Lazy:
    """A same-object push whose path must come from a forward-only Hybrid A* query."""
    object_id: int
    src: int
    dst: int


@dataclass
class _State:
    world: World
    robot: Pose2D
    subtasks: list


class _Sequencer:
    def __init__(self, scenario: Scenario, robot_start: Pose2D, car: CarModel, cfg: PlannerConfig, algo: str):
        self.sc = scenario
        self.car = car
        self.cfg = cfg
        self.algo = algo
        self.robot_start = robot_start
        self.ds = scenario.workspace.grid_resolution / 2.0
        self._approaches: dict = {}  # (start, goal, object layout) -> path or None

    # -- helpers ---------------------------------------------------------

    def _initial_world(self) -> World:
        objs = {o.id: o for o in self.sc.objects}
        fixed = {}
        for o in self.sc.objects:
            dpos, dang = pose_error(o.footprint, o.start, o.goal)
            if dpos > self.cfg.pos_tol or dang > self.cfg.ang_tol:
                continue
            here = footprint_at(o.footprint, o.start)
            if any(collides(here, footprint_at(p.footprint, p.goal)) for p in self.sc.objects if p.id != o.id):
                continue
            fixed[o.id] = (o.footprint, o.start)
            del objs[o.id]
        return World(self.sc.workspace, self.car, objs, fixed, self.cfg.inflation)

    def _touching(self, world: World, pose: Pose2D) -> set:
        """Objects whose inflated footprint the robot body overlaps at ``pose``."""
        body = self.car.body.polygons_at(pose)
        out = set()
        for oid, (fp, p) in world.footprints().items():
            grown = footprint_at(fp.inflated(world.inflation), p)
            if any(collides(poly, grown) for poly in body):
                out.add(oid)
        return out

    def approach(self, world: World, start: Pose2D, goal: Pose2D) -> MotionPath | None:
        """Free-motion path between two poses that may be in contact with objects.

        Contact at either end is handled by a short straight back-off (or final
        straight docking move) checked against true outlines, so the Hybrid A*
        part can run against inflated obstacles. When that fails, the search is
        repeated with every object grown by only ``TIGHT_MARGIN`` and the result
        is re-checked at a spacing fine enough that no sample gap can hide an
        overlap with a true outline.
        """
        if start.close_to(goal, 1e-9, 1e-9):
            return MotionPath(start)
        key = (start.as_tuple(), goal.as_tuple(), world.layout())
        if key not in self._approaches:
            self._approaches[key] = self._approach(world, start, goal)
        return self._approaches[key]

    def _approach(self, world: World, start: Pose2D, goal: Pose2D) -> MotionPath | None:
        head, tail = [], []
        s, g = start, goal
        if self._touching(world, start):
            off = straight(start, -BACKOFF)
            if self._clear(world, off):
                head, s = list(off.pieces), off.end
        if self._touching(world, goal):
            dock = straight(straight(goal, -BACKOFF).end, BACKOFF)
            if self._clear(world, dock):
                tail, g = list(dock.pieces), dock.start
        everything = frozenset(world.footprints())
        raw = self._touching(world, s) | self._touching(world, g)
        for scene_raw in ((raw, everything) if raw != everything else (everything,)):
            mid = self._search(world, s, g, world.scene(raw=scene_raw, raw_margin=TIGHT_MARGIN))
            if mid is None:
                continue
            path = MotionPath(start, merge_pieces(head + list(mid.pieces) + tail))
            if not scene_raw or self._clear(world, MotionPath(s, mid.pieces), fine=True):
                return path
        return None

    def _search(self, world: World, s: Pose2D, g: Pose2D, scene) -> MotionPath | None:
        # tight-margin results get a fine re-check, so search at the regular density
        try:
            return hybrid_astar(s, g, world.workspace, scene, self.car, config=self.cfg.astar,
                                clearance=max(scene.clearance, world.inflation))
        except (UnreachableGoalError, ValueError):
            return None

    def _clear(self, world: World, path: Trajectory, fine: bool = False) -> bool:
        """Robot path free against true outlines (grown by ``TIGHT_MARGIN`` when ``fine``)."""
        if fine:
            scene = world.scene(raw=world.footprints(), raw_margin=TIGHT_MARGIN)
            ds = TIGHT_MARGIN
        else:
            scene = world.scene(raw=world.footprints())
            ds = self.ds / 5.0
        return path.status(self.car.body, scene, world.workspace, ds) == 0

    def _push_clear(self, world: World, oid: int, side: int, path: Trajectory) -> bool:
        body = pushing_body(self.car, world.objects[oid].footprint, side)
        scene = world.scene(exclude={oid})
        return path.status(body, scene, world.workspace, self.ds) == 0

    def _final_pose(self, world: World, oid: int, side: int, robot_end: Pose2D) -> Pose2D | None:
        obj = world.objects[oid]
        end = robot_end.compose(contact_transform(self.car, obj.footprint, side))
        dpos, dang = pose_error(obj.footprint, end, obj.goal)
        return end if dpos < 1e-6 and dang < 1e-6 else None

    def _with_approach(self, st: _State, goal: Pose2D, kind: str, oid: int, path: Trajectory) -> bool:
        app = self.approach(st.world, st.robot, goal)
        if app is None:
            return False
        st.subtasks += [Subtask(APPROACH, oid, app), Subtask(kind, oid, path)]
        st.robot = path.end
        return True

    # -- candidate expansion ---------------------------------------------

    def expand_graph(self, world: World, robot: Pose2D, g: PTGraph, gp: GraphPath):
        """Subtasks for a PT-graph path: blocker removals, optional prerelocation, then the push."""
        first = g.vertices[gp.vertex_sequence[0]]
        oid, side = first.object_id, first.side
        pre = gp.edges[0].prerelocation
        route = concatenate([e.push_path for e in gp.edges])
        if self._final_pose(world, oid, side, route.end) is None:
            return None
        st = _State(world, robot, [])
        obj = world.objects[oid]
        keep = sweep_polygons(route, pushing_body(self.car, obj.footprint, side), self.ds)

        def ready() -> bool:
            if pre is not None:
                w = st.world
                prepush = Trajectory(pushing_pose(self.car, obj.footprint, w.objects[oid].start, pre.push_side),
                                     pre.prepush_path.pieces)
                if not self._push_clear(w, oid, pre.push_side, prepush):
                    return False
            return self._push_clear(st.world, oid, side, route)

        for i, v in enumerate(gp.vertex_sequence[1:-1]):
            blocker = g.vertices[v].object_id
            if blocker not in st.world.objects or ready():
                continue
            try:
                rem = plan_removal(blocker, gp.edges[i], st.world, g, keep_clear=keep,
                                   step=self.cfg.prerelo_step, limit=self.cfg.prerelo_max)
            except PlanningLogicError:
                continue
            if rem is None:
                return None
            if not self._with_approach(st, rem.push_segment.start, REMOVE_BLOCKER, blocker, rem.push_segment):
                return None
            st.world = st.world.moved(blocker, rem.to_pose)

        if pre is not None:
            cur = st.world.objects[oid].start
            prepush = Trajectory(pushing_pose(self.car, obj.footprint, cur, pre.push_side), pre.prepush_path.pieces)
            if not self._push_clear(st.world, oid, pre.push_side, prepush):
                return None
            if not self._with_approach(st, prepush.start, PRERELOCATE, oid, prepush):
                return None
            st.world = st.world.moved(oid, pre.new_object_pose)
        if not self._push_clear(st.world, oid, side, route):
            return None
        final = self._final_pose(st.world, oid, side, route.end)
        if not self._with_approach(st, route.start, PUSH, oid, route):
            return None
        st.world = st.world.placed(oid, final)
        return st

    def expand_lazy(self, world: World, robot: Pose2D, g: PTGraph, item: _Lazy, path: MotionPath):
        side = g.vertices[item.src].side
        final = self._final_pose(world, item.object_id, side, path.end)
        if final is None:
            return None
        st = _State(world, robot, [])
        if not self._with_approach(st, path.start, PUSH, item.object_id, path):
            return None
        st.world = st.world.placed(item.object_id, final)
        return st

    def push_search(self, world: World, g: PTGraph, item: _Lazy) -> MotionPath | None:
        """Forward-only pushing path at the pushing turning radius, or None."""
        vs, vg = g.vertices[item.src], g.vertices[item.dst]
        obj = world.objects[item.object_id]
        body = pushing_body(self.car, obj.footprint, vs.side)
        try:
            return hybrid_astar(vs.robot_pose, vg.robot_pose, world.workspace, world.scene(exclude={obj.id}),
                                self.car, body=body, rho=self.car.rho_push, allow_reverse=False,
                                config=self.cfg.astar)
        except (UnreachableGoalError, ValueError):
            return None

    # -- main loop ---------------------------------------------------------

    def _lazy_items(self, world: World, g: PTGraph, skip_valid: bool):
        out = []
        for oid in sorted(world.objects):
            obj = world.objects[oid]
            for s in g.vertex_ids(oid, START):
                for t in g.vertex_ids(oid, GOAL):
                    vs, vg = g.vertices[s], g.vertices[t]
                    if not _reaches_goal(self.car, obj, vs, vg):
                        continue
                    if skip_valid and g.edge(s, t) is not None:
                        continue
                    bound = shortest_dubins(vs.robot_pose, vg.robot_pose, self.car.rho_push).total_length
                    out.append((bound, oid, vs.side, vg.side, _Lazy(oid, s, t)))
        return out

    def round(self, world: World, robot: Pose2D):
        if self.algo == MP:
            g = PTGraph(gen_vertices(list(world.objects.values()), self.car), [])
        else:
            g = gen_graph(world, prerelocate=self.algo == RELOPUSH,
                          step=self.cfg.prerelo_step, limit=self.cfg.prerelo_max)
        heap = []
        tick = itertools.count()
        if self.algo != MP:
            for oid in sorted(world.objects):
                for gp in candidate_paths(g, oid):
                    key = (gp.total_cost, oid, g.vertices[gp.vertex_sequence[0]].side,
                           g.vertices[gp.vertex_sequence[-1]].side)
                    heap.append((key, next(tick), gp, None))
        if self.algo != RELOPUSH:
            for bound, oid, ks, kg, item in self._lazy_items(world, g, skip_valid=self.algo == NPR):
                heap.append(((bound, oid, ks, kg), next(tick), item, None))
        heapq.heapify(heap)
        rejected = []
        while heap:
            key, _, item, path = heapq.heappop(heap)
            if isinstance(item, _Lazy) and path is None:
                found = self.push_search(world, g, item)
                if found is not None:
                    heapq.heappush(heap, ((found.length,) + key[1:], next(tick), item, found))
                continue
            if isinstance(item, _Lazy):
                st = self.expand_lazy(world, robot, g, item, path)
            else:
                st = self.expand_graph(world, robot, g, item)
            if st is not None:
                oid = item.object_id if isinstance(item, _Lazy) else g.vertices[item.vertex_sequence[0]].object_id
                return st, Round(oid, key[0], tuple(rejected))
            rejected.append(key[0])
        return None

    def run(self) -> RearrangementPlan | None:
        world = self._initial_world()
        robot = self.robot_start
        if sweep_status([robot.as_tuple()], self.car.body, world.scene(raw=world.footprints()),
                        world.workspace) != 0:
            raise ValueError("robot start pose is in collision or out of bounds")
        subtasks, order, rounds = [], [], []
        while world.objects:
            step = self.round(world, robot)
            if step is None:
                return None
            st, info = step
            subtasks += st.subtasks
            order.append(info.object_id)
            rounds.append(info)
            world, robot = st.world, st.robot
        final = {oid: pose for oid, (_, pose) in world.fixed.items()}
        return RearrangementPlan(tuple(subtasks), tuple(order), self.robot_start, final, tuple(rounds))


def plan(scenario: Scenario, algo: str = RELOPUSH, robot_start: Pose2D | None = None,
         car: CarModel | None = None, config: PlannerConfig | None = None) -> RearrangementPlan | None:
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    seq = _Sequencer(scenario, robot_start or scenario.robot_start, car or scenario.car,
                     config or PlannerConfig(), algo)
    return seq.run()


def plan_relopush(scenario, robot_start=None, car=None, config=None):
    """Greedy PT-graph rearrangement with prerelocation and blocker removal."""
    return plan(scenario, RELOPUSH, robot_start, car, config)


def plan_npr(scenario, robot_start=None, car=None, config=None):
    """PT-graph rearrangement without prerelocation; invalid direct pushes fall back to Hybrid A*."""
    return plan(scenario, NPR, robot_start, car, config)


def plan_mp(scenario, robot_start=None, car=None, config=None):
    """Graph-free greedy baseline: each push is a forward-only Hybrid A* query."""
    return plan(scenario, MP, robot_start, car, config)
