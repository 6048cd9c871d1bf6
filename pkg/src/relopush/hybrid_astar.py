"""Hybrid A* over an SE(2) lattice for free (and, in the baselines, pushing) motion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from skimage.graph import MCP_Geometric

from . import _kernels
from .geometry import Body, Pose2D, Scene, Workspace, angle_diff, sweep_status
from .paths import FORWARD, REVERSE, Piece, Trajectory
from .robot import CarModel


class UnreachableGoalError(ValueError):
    """The goal pose itself is in collision or outside the workspace."""


@dataclass(frozen=True)
class AStarConfig:
    heading_bins: int = 72
    reverse_penalty: float = 2.0   # cost multiplier on reverse arc length
    switch_penalty: float = 0.5    # metres added per change of direction
    max_expansions: int = 200_000
    analytic_cells: int = 10       # try a direct Dubins connection within this many cells
    step_cells: float = 1.5        # primitive arc length, in grid cells
    pos_tol: float = 0.05
    ang_tol: float = 0.1


@dataclass(frozen=True)
class MotionPath(Trajectory):
    """Trajectory whose pieces may alternate between forward and reverse."""

    def segments(self, ds: float) -> list[tuple[int, list[Pose2D]]]:
        """Sampled poses grouped into maximal runs of one driving direction."""
        out: list[tuple[int, list[Pose2D]]] = []
        pose = self.start
        run: list[Piece] = []
        for p in self.pieces + (None,):
            if p is not None and (not run or run[-1].direction == p.direction):
                run.append(p)
                continue
            if run:
                seg = Trajectory(pose, tuple(run))
                out.append((run[0].direction, seg.sample(ds)))
                pose = seg.end
            run = [p] if p is not None else []
        return out


def merge_pieces(pieces: list[Piece]) -> tuple[Piece, ...]:
    out: list[Piece] = []
    for p in pieces:
        if p.length <= 0:
            continue
        if out and out[-1].direction == p.direction and abs(out[-1].kappa - p.kappa) < 1e-12:
            out[-1] = Piece(p.kappa, out[-1].length + p.length, p.direction)
        else:
            out.append(p)
    return tuple(out)


def grid_distance(goal: Pose2D, w: Workspace, scene: Scene) -> np.ndarray:
    """Obstacle-aware 8-connected distance from each cell centre to the goal cell.

    A cell counts as blocked only when it lies entirely inside an obstacle. One
    cell diagonal is subtracted so that, for any point in a cell, the value never
    overestimates the true obstacle-avoiding distance of a point robot.
    """
    res = w.grid_resolution
    x0, y0, x1, y1 = w.bounds
    nx = max(1, int(math.ceil((x1 - x0) / res - 1e-9)))
    ny = max(1, int(math.ceil((y1 - y0) / res - 1e-9)))
    cost = np.ones((nx, ny))
    gx = x0 + np.arange(nx + 1) * res
    gy = y0 + np.arange(ny + 1) * res
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    for poly in scene.polygons:
        inside = np.ones_like(X, dtype=bool)
        for i in range(len(poly)):
            a, b = poly[i], poly[(i + 1) % len(poly)]
            inside &= (b[0] - a[0]) * (Y - a[1]) - (b[1] - a[1]) * (X - a[0]) >= 0
        cell = inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]
        cost[cell] = np.inf
    gi = min(nx - 1, max(0, int((goal.x - x0) / res)))
    gj = min(ny - 1, max(0, int((goal.y - y0) / res)))
    cost[gi, gj] = 1.0
    dist, _ = MCP_Geometric(cost, fully_connected=True).find_costs([(gi, gj)])
    return np.maximum(dist * res - math.sqrt(2.0) * res, 0.0)


def hybrid_astar(start: Pose2D, goal: Pose2D, w: Workspace, obstacles: Scene, car: CarModel, *,
                 body: Body | None = None, rho: float | None = None, allow_reverse: bool = True,
                 config: AStarConfig | None = None, clearance: float | None = None) -> MotionPath | None:
    """Collision-free, curvature-bounded path from ``start`` to exactly ``goal``.

    The search only terminates through an analytic Dubins connection, so a
    returned path ends on the goal pose. With ``allow_reverse`` the connection may
    also be a Dubins curve driven backwards. Returns None when the search space or
    the expansion budget is exhausted. Sampling density follows the obstacles'
    clearance unless ``clearance`` overrides it.
    """
    cfg = config or AStarConfig()
    body = body or car.body
    rho = rho or car.rho_free
    res = w.grid_resolution
    ds = res / 2.0
    if start.distance_to(goal) < 1e-9 and angle_diff(start.theta, goal.theta) < 1e-9:
        return MotionPath(start)
    if sweep_status(np.array([goal.as_tuple()]), body, obstacles, w) != 0:
        raise UnreachableGoalError("goal pose is in collision or out of bounds")
    if sweep_status(np.array([start.as_tuple()]), body, obstacles, w) != 0:
        raise ValueError("start pose is in collision or out of bounds")

    x0, y0, x1, y1 = w.bounds
    h2d = grid_distance(goal, w, obstacles)
    step = cfg.step_cells * res
    prims = [(d, k) for d in ((FORWARD, REVERSE) if allow_reverse else (FORWARD,))
             for k in (1.0 / rho, 0.0, -1.0 / rho)]
    # the far body corners move fastest on the tightest turns
    move = 2.0 * obstacles.clearance if clearance is None else 2.0 * clearance
    h = _kernels.piece_step(ds, 1.0 / rho, move, body.radius)
    nsub = max(1, int(math.ceil(step / h - 1e-9)))
    local = np.empty((len(prims), nsub, 3))
    for i, (d, k) in enumerate(prims):
        for j in range(nsub):
            local[i, j] = _kernels.advance(0.0, 0.0, 0.0, k, d * step * (j + 1) / nsub)
    found, seq, word, t, p, q, rev, _ = _kernels.hybrid_search(
        start.x, start.y, start.theta, goal.x, goal.y, goal.theta, h2d, x0, y0, res, local,
        np.array([k for _, k in prims]), np.array([d for d, _ in prims], dtype=np.int64), step,
        cfg.heading_bins, cfg.reverse_penalty, cfg.switch_penalty, cfg.analytic_cells * res, rho,
        allow_reverse, cfg.max_expansions, body.verts, body.offsets, body.radius,
        obstacles.verts, obstacles.offsets, obstacles.circles, x1, y1, 1e-9, ds, move)
    if not found:
        return None
    pieces = [Piece(prims[i][1], step, prims[i][0]) for i in seq]
    if word >= 0:
        kappas, lengths, dirs = _kernels.word_pieces(word, t, p, q, rho, rev)
        pieces += [Piece(float(k), float(L), int(d)) for k, L, d in zip(kappas, lengths, dirs)]
    return MotionPath(start, merge_pieces(pieces))
