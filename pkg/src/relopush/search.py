"""Cheapest rearrangement paths over the PT-graph and blocker relocation."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Body, Pose2D, Scene, Workspace, collides, footprint_at, sweep_status
from .paths import Trajectory, straight
from .ptgraph import GOAL, PRERELO_MAX, PRERELO_STEP, START, PTEdge, PTGraph, max_prepush
from .robot import push_direction, pushable_sides, pushing_body, pushing_pose
from .world import World


class PlanningLogicError(RuntimeError):
    """A caller violated a precondition of a planning routine."""


@dataclass(frozen=True)
class GraphPath:
    vertex_sequence: tuple[int, ...]
    total_cost: float
    blockers: tuple[int, ...]
    edges: tuple[PTEdge, ...]


def _dijkstra(g: PTGraph, source: int) -> tuple[dict[int, float], dict[int, PTEdge]]:
    """Single-source costs; only the first hop may use a prerelocated edge.

    Goal-role vertices are never expanded and vertices of the source's own object
    are never passed through.
    """
    owner = g.vertices[source].object_id
    dist = {source: 0.0}
    pred: dict[int, PTEdge] = {}
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        vu = g.vertices[u]
        if u != source and (vu.role == GOAL or vu.object_id == owner):
            continue
        for e in g.out_edges.get(u, ()):
            if e.prerelocation is not None and u != source:
                continue
            nd = d + e.weight
            if nd < dist.get(e.dst, math.inf):
                dist[e.dst] = nd
                pred[e.dst] = e
                heapq.heappush(heap, (nd, e.dst))
    return dist, pred


def _unwind(g: PTGraph, source: int, target: int, pred: dict[int, PTEdge]) -> tuple[PTEdge, ...]:
    edges = []
    v = target
    while v != source:
        e = pred[v]
        edges.append(e)
        v = e.src
    return tuple(reversed(edges))


def candidate_paths(g: PTGraph, object_id: int) -> list[GraphPath]:
    """Cheapest path for every reachable (start side, goal side) pair of an object."""
    out = []
    goals = g.vertex_ids(object_id, GOAL)
    for s in g.vertex_ids(object_id, START):
        dist, pred = _dijkstra(g, s)
        for t in goals:
            if t not in dist:
                continue
            edges = _unwind(g, s, t, pred)
            seq = (s,) + tuple(e.dst for e in edges)
            blockers = []
            for v in seq[1:-1]:
                oid = g.vertices[v].object_id
                if oid not in blockers:
                    blockers.append(oid)
            out.append(GraphPath(seq, dist[t], tuple(blockers), edges))
    out.sort(key=lambda p: (p.total_cost, g.vertices[p.vertex_sequence[0]].side,
                            g.vertices[p.vertex_sequence[-1]].side))
    return out


def min_cost_path(g: PTGraph, object_id: int) -> GraphPath | None:
    """Cheapest start-to-goal path of ``object_id``; ties go to the lowest (start side, goal side)."""
    if not g.vertex_ids(object_id):
        raise KeyError(f"graph has no vertices for object {object_id}")
    paths = candidate_paths(g, object_id)
    return paths[0] if paths else None


@dataclass(frozen=True)
class RemovalAction:
    object_id: int
    from_pose: Pose2D
    to_pose: Pose2D
    push_segment: Trajectory
    push_side: int

    @property
    def displacement(self) -> float:
        return self.from_pose.distance_to(self.to_pose)


def sweep_polygons(path: Trajectory, body: Body, ds: float) -> list[np.ndarray]:
    """World polygons of ``body`` at every sample of ``path``."""
    out = []
    for row in path.sample_array(ds):
        out.extend(body.polygons_at(Pose2D(*row)))
    return out


def plan_removal(blocker_id: int, blocked_edge: PTEdge, world: World, g: PTGraph, *,
                 keep_clear: Sequence[np.ndarray] = (), step: float = PRERELO_STEP,
                 limit: float = PRERELO_MAX) -> RemovalAction | None:
    """Nearest straight push of a blocker off the blocked edge's sweep.

    The buffer pose is searched in ``step`` increments along each push direction
    of the blocker up to ``limit``. It must be reachable by a feasible straight
    push and clear of the edge's sweep, of ``keep_clear`` polygons, and of every
    unplaced object's goal footprint.
    """
    w = world.workspace
    ds = w.grid_resolution / 2.0
    blocker = world.objects[blocker_id]
    src = g.vertices[blocked_edge.src]
    mover = world.objects.get(src.object_id)
    if mover is None:
        raise PlanningLogicError(f"object {src.object_id} of the blocked edge is not in the world")
    sweep = sweep_polygons(blocked_edge.push_path, pushing_body(world.car, mover.footprint, src.side), ds)
    here = footprint_at(blocker.footprint, blocker.start)
    if not any(collides(here, p) for p in sweep):
        raise PlanningLogicError(f"object {blocker_id} does not block the given edge")
    forbidden = Scene(sweep + list(keep_clear) + [footprint_at(o.footprint, o.goal) for o in world.objects.values()])
    probe = Body((blocker.footprint.inflated(world.inflation),))
    sides = pushable_sides(world.car, blocker.footprint)
    reach = {j: max_prepush(world, blocker, j, step, limit) for j in sides}
    for i in range(1, int(math.floor(limit / step + 1e-9)) + 1):
        disp = i * step
        for j in sides:
            if reach[j] < disp - 1e-9:
                continue
            ux, uy = push_direction(blocker.footprint, blocker.start, j)
            buffer = blocker.start.translated(ux * disp, uy * disp)
            if sweep_status(np.array([buffer.as_tuple()]), probe, forbidden, _unbounded(w)) != 0:
                continue
            start = pushing_pose(world.car, blocker.footprint, blocker.start, j)
            return RemovalAction(blocker_id, blocker.start, buffer, straight(start, disp), j)
    return None


def _unbounded(w):
    x0, y0, x1, y1 = w.bounds
    pad = 1e6
    return Workspace(x1 - x0 + 2 * pad, y1 - y0 + 2 * pad, (x0 - pad, y0 - pad), w.grid_resolution)
