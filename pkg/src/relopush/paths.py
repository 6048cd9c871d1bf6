"""Piecewise constant-curvature paths shared by every planner and the simulator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .geometry import Pose2D

FORWARD, REVERSE = 1, -1


class Piece(NamedTuple):
    kappa: float      # signed curvature, positive turns left
    length: float     # arc length, >= 0
    direction: int = FORWARD


def advance(pose: Pose2D, kappa: float, s: float) -> Pose2D:
    """Pose after signed arc length ``s`` along curvature ``kappa``."""
    return Pose2D(*_kernels.advance(pose.x, pose.y, pose.theta, kappa, s))


@dataclass(frozen=True)
class Trajectory:
    start: Pose2D
    pieces: tuple[Piece, ...] = ()

    @property
    def length(self) -> float:
        return float(sum(p.length for p in self.pieces))

    @property
    def end(self) -> Pose2D:
        pose = self.start
        for p in self.pieces:
            pose = advance(pose, p.kappa, p.direction * p.length)
        return pose

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = np.array([p.kappa for p in self.pieces], dtype=float)
        L = np.array([p.length for p in self.pieces], dtype=float)
        d = np.array([p.direction for p in self.pieces], dtype=float)
        return k, L, d

    def sample_array(self, ds: float) -> np.ndarray:
        if ds <= 0:
            raise ValueError("sampling step must be positive")
        k, L, d = self.arrays()
        return _kernels.sample_pieces(self.start.x, self.start.y, self.start.theta, k, L, d, ds)

    def sample(self, ds: float) -> list[Pose2D]:
        return [Pose2D(*row) for row in self.sample_array(ds)]

    def then(self, other: "Trajectory") -> "Trajectory":
        return Trajectory(self.start, self.pieces + tuple(other.pieces))

    def status(self, body, scene, w, ds: float, tol: float = 1e-9) -> int:
        """0 free, 1 collision, 2 out of bounds for ``body`` driven along this path.

        Collisions are tested at samples spaced at most ``ds``. When the scene
        polygons carry a clearance, samples are also close enough that no body
        point moves more than twice that clearance between them, so no true
        overlap can hide between samples. Containment in the workspace is tested
        exactly.
        """
        if ds <= 0:
            raise ValueError("sampling step must be positive")
        k, L, d = self.arrays()
        x0, y0, x1, y1 = w.bounds
        move = 2.0 * getattr(scene, "clearance", 0.0)
        return int(_kernels.check_pieces(self.start.x, self.start.y, self.start.theta, k, L, d, ds, move,
                                         body.verts, body.offsets, body.radius, scene.verts, scene.offsets,
                                         scene.circles, x0, y0, x1, y1, tol))

    @property
    def has_reverse(self) -> bool:
        return any(p.direction == REVERSE and p.length > 0 for p in self.pieces)


def straight(start: Pose2D, distance: float) -> Trajectory:
    """Forward straight segment (negative distance drives in reverse)."""
    if distance == 0:
        return Trajectory(start)
    direction = FORWARD if distance > 0 else REVERSE
    return Trajectory(start, (Piece(0.0, abs(distance), direction),))


def concatenate(parts: Sequence[Trajectory]) -> Trajectory:
    out = Trajectory(parts[0].start)
    for p in parts:
        out = out.then(p)
    return out
