"""Kinematic replay of rearrangement plans with rigid, slip-free pushing."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import Pose2D, collides, footprint_at, pose_error, within_bounds
from .paths import advance
from .planner import RearrangementPlan
from .scenario import Scenario

DEFAULT_SPEED = 0.4
TRACE_DT = 0.05
REPLAY_TOL = 1e-6
CONTINUITY_TOL = 1e-6


class ExecutionError(RuntimeError):
    """A subtask does not start where the previous one ended."""

    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"subtask {index}: {message}")


class CollisionError(RuntimeError):
    """Interpenetration or leaving the workspace during replay."""

    def __init__(self, index: int, t: float, message: str):
        self.index = index
        self.t = t
        super().__init__(f"subtask {index} at t={t:.2f}s: {message}")


@dataclass(frozen=True)
class SimState:
    robot: Pose2D
    objects: dict = field(default_factory=dict)
    attached: int | None = None
    t: float = 0.0
    odometer: float = 0.0
    push_odometer: float = 0.0


def goal_errors(state: SimState, scenario: Scenario) -> dict[int, tuple[float, float]]:
    """Per-object (position, heading) error to the goal, heading modulo footprint symmetry."""
    return {o.id: pose_error(o.footprint, state.objects[o.id], o.goal) for o in scenario.objects}


def _apart(a, b) -> bool:
    """Axis-aligned boxes are separated by more than the tolerance; skips the full test."""
    return bool(np.any(a.min(axis=0) > b.max(axis=0) + REPLAY_TOL)
                or np.any(b.min(axis=0) > a.max(axis=0) + REPLAY_TOL))


def _check(state: SimState, scenario: Scenario, index: int):
    w = scenario.workspace
    robot = footprint_at(scenario.car.body_footprint, state.robot)
    if not within_bounds(robot, w, REPLAY_TOL):
        raise CollisionError(index, state.t, "robot leaves the workspace")
    polys = {o.id: footprint_at(o.footprint, state.objects[o.id]) for o in scenario.objects}
    for oid, poly in polys.items():
        if _apart(robot, poly):
            continue
        if collides(robot, poly, REPLAY_TOL):
            raise CollisionError(index, state.t, f"robot overlaps object {oid}")
    if state.attached is not None:
        held = polys[state.attached]
        if not within_bounds(held, w, REPLAY_TOL):
            raise CollisionError(index, state.t, f"object {state.attached} leaves the workspace")
        for oid, poly in polys.items():
            if oid != state.attached and not _apart(held, poly) and collides(held, poly, REPLAY_TOL):
                raise CollisionError(index, state.t, f"object {state.attached} overlaps object {oid}")


def execute(plan: RearrangementPlan, scenario: Scenario, speed: float = DEFAULT_SPEED,
            dt: float = TRACE_DT, check: bool = True) -> tuple[SimState, list[SimState]]:
    """Drive the plan at constant speed; returns the final state and a trace sampled every ``dt``.

    Pushing subtasks lock their object to the bumper frame for their whole
    duration. Poses follow the exact constant-curvature solution of the
    rear-axle car model within each path piece.
    """
    if speed <= 0:
        raise ValueError("speed must be positive")
    state = SimState(plan.robot_start, {o.id: o.start for o in scenario.objects})
    trace = [state]
    k = 1  # index of the next trace sample
    for index, sub in enumerate(plan.subtasks):
        start = sub.path.start
        if not start.close_to(state.robot, CONTINUITY_TOL, CONTINUITY_TOL):
            raise ExecutionError(index, f"starts at {start} but the robot is at {state.robot}")
        rel = None
        if sub.pushing:
            rel = state.objects[sub.object_id].relative_to(state.robot)
            state = replace(state, attached=sub.object_id)
        robot = sub.path.start
        for piece in sub.path.pieces:
            done = 0.0
            while done < piece.length - 1e-12:
                h = min(piece.length - done, k * dt * speed - state.odometer)
                h = max(h, 0.0)
                done += h
                robot = advance(robot, piece.kappa, piece.direction * h)
                objects = state.objects
                if rel is not None:
                    objects = dict(objects)
                    objects[sub.object_id] = robot.compose(rel)
                state = SimState(robot, objects, state.attached, state.t + h / speed, state.odometer + h,
                                 state.push_odometer + (h if rel is not None else 0.0))
                if state.odometer >= k * dt * speed - 1e-12:
                    if check:
                        _check(state, scenario, index)
                    trace.append(state)
                    k += 1
        # land exactly on the planned end pose to stop round-off from accumulating
        objects = state.objects
        if rel is not None:
            objects = dict(objects)
            objects[sub.object_id] = sub.path.end.compose(rel)
        state = SimState(sub.path.end, objects, None, state.t, state.odometer, state.push_odometer)
        if check:
            _check(state, scenario, index)
    if len(trace) > 1 and trace[-1].t >= state.t - 1e-12:
        trace[-1] = state  # the run ended on a sample tick
    elif trace[-1] is not state:
        trace.append(state)
    return state, trace


def execution_time(state: SimState, speed: float = DEFAULT_SPEED) -> float:
    return state.odometer / speed


def write_trace(trace: list[SimState], path, object_ids=None) -> None:
    """CSV with t, robot pose, every object's pose and the attached object id."""
    ids = sorted(object_ids if object_ids is not None else (trace[0].objects if trace else ()))
    with open(path, "w", newline="") as f:
        out = csv.writer(f)
        header = ["t", "robot_x", "robot_y", "robot_theta"]
        for oid in ids:
            header += [f"obj{oid}_x", f"obj{oid}_y", f"obj{oid}_theta"]
        out.writerow(header + ["attached"])
        for s in trace:
            row = [f"{s.t:.3f}", f"{s.robot.x:.6f}", f"{s.robot.y:.6f}", f"{s.robot.theta:.6f}"]
            for oid in ids:
                p = s.objects[oid]
                row += [f"{p.x:.6f}", f"{p.y:.6f}", f"{p.theta:.6f}"]
            out.writerow(row + ["" if s.attached is None else s.attached])
