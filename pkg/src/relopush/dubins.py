"""Shortest bounded-curvature forward paths and their long/short classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels
from ._kernels import WORDS
from .geometry import Body, Pose2D, Scene, Workspace, angle_diff, normalize_angle
from .paths import FORWARD, Piece, Trajectory

COLLISION = "collision"
OUT_OF_BOUNDS = "out_of_bounds"


class DegenerateCaseError(ValueError):
    """Start and goal positions coincide, so the bearing between them is undefined."""


@dataclass(frozen=True)
class PathClass:
    alpha: float
    beta: float
    d: float
    d_th: float
    is_long: bool


def classify(start: Pose2D, goal: Pose2D, rho: float) -> PathClass:
    """Long/short case of a pose pair.

    Headings are measured against the start-to-goal bearing; the pair is Long when
    the rho-normalised distance strictly exceeds
    ``|sin a| + |sin b| + sqrt(4 - (cos a + cos b)^2)``.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    dx, dy = goal.x - start.x, goal.y - start.y
    dist = math.hypot(dx, dy)
    if dist < 1e-12:
        raise DegenerateCaseError("coincident start and goal positions")
    bearing = math.atan2(dy, dx)
    alpha = normalize_angle(start.theta - bearing)
    beta = normalize_angle(goal.theta - bearing)
    ca, cb = math.cos(alpha), math.cos(beta)
    d_th = abs(math.sin(alpha)) + abs(math.sin(beta)) + math.sqrt(max(0.0, 4.0 - (ca + cb) ** 2))
    d = dist / rho
    return PathClass(alpha, beta, d, d_th, d > d_th)


def is_long(start: Pose2D, goal: Pose2D, rho: float) -> bool:
    try:
        return classify(start, goal, rho).is_long
    except DegenerateCaseError:
        return False


@dataclass(frozen=True)
class DubinsPath(Trajectory):
    word: str = "LSL"
    seg_params: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rho: float = 1.0
    total_length: float = 0.0
    classification: str = "Short"
    goal: Pose2D | None = field(default=None, compare=False)

    def __post_init__(self):
        pieces = []
        for letter, t in zip(self.word, self.seg_params):
            if t <= 0.0:
                continue
            kappa = {"L": 1.0 / self.rho, "R": -1.0 / self.rho, "S": 0.0}[letter]
            pieces.append(Piece(kappa, t * self.rho, FORWARD))
        object.__setattr__(self, "pieces", tuple(pieces))

    @property
    def is_long(self) -> bool:
        return self.classification == "Long"


def candidate_words(start: Pose2D, goal: Pose2D, rho: float) -> dict[str, tuple[float, float, float]]:
    """Normalised segment parameters of every feasible word."""
    dx, dy = goal.x - start.x, goal.y - start.y
    dist = math.hypot(dx, dy)
    bearing = math.atan2(dy, dx) if dist > 0 else 0.0
    rows = _kernels.dubins_words(_kernels.mod2pi(start.theta - bearing),
                                 _kernels.mod2pi(goal.theta - bearing), dist / rho)
    return {w: tuple(float(v) for v in row) for w, row in zip(WORDS, rows) if not math.isnan(row[0])}


def shortest_dubins(start: Pose2D, goal: Pose2D, rho: float) -> DubinsPath:
    """Minimum-length word; exact ties keep enumeration order LSL, RSR, LSR, RSL, RLR, LRL."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    try:
        cls = "Long" if classify(start, goal, rho).is_long else "Short"
    except DegenerateCaseError:
        cls = "Short"
    if start.distance_to(goal) < 1e-12 and angle_diff(start.theta, goal.theta) < 1e-12:
        return DubinsPath(start, (), "LSL", (0.0, 0.0, 0.0), rho, 0.0, cls, goal)
    best = None
    for word, params in candidate_words(start, goal, rho).items():
        total = sum(params)
        if best is None or total < best[0]:
            best = (total, word, params)
    total, word, params = best
    return DubinsPath(start, (), word, params, rho, total * rho, cls, goal)


def sample_path(path: Trajectory, ds: float) -> list[Pose2D]:
    """Poses along the path at spacing at most ``ds``, both ends included."""
    if not ds > 0:
        raise ValueError("ds must be positive")
    return path.sample(ds)


def check_path(path: Trajectory, body: Body, scene: Scene, w: Workspace, ds: float) -> str | None:
    """None when the swept body stays free and inside ``w``, else the failure reason."""
    status = path.status(body, scene, w, ds)
    return {0: None, 1: COLLISION, 2: OUT_OF_BOUNDS}[status]


def valid_dubins(start: Pose2D, goal: Pose2D, rho: float, w: Workspace, obstacles,
                 moving_footprint, ds: float | None = None) -> tuple[DubinsPath | None, str | None]:
    """Shortest Dubins path if its sweep is collision-free and in bounds.

    Returns ``(path, None)`` on success and ``(None, reason)`` otherwise, where an
    out-of-bounds sample outranks a collision.
    """
    path = shortest_dubins(start, goal, rho)
    scene = obstacles if isinstance(obstacles, Scene) else Scene(list(obstacles))
    body = Body.of(moving_footprint)
    reason = check_path(path, body, scene, w, w.grid_resolution / 2.0 if ds is None else ds)
    if reason is not None:
        return None, reason
    return path, None
