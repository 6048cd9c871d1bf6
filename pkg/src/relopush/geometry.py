"""SE(2) poses, convex footprints, workspace bounds and collision tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
CONTACT_TOL = 1e-9  # boundary contact within this distance is not a collision


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta + math.pi, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    r -= math.pi
    if r >= math.pi:
        r -= TWO_PI
    return r


def angle_diff(a: float, b: float) -> float:
    """Smallest absolute difference between two headings."""
    return abs(normalize_angle(a - b))


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pose position must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def compose(self, other: "Pose2D") -> "Pose2D":
        """Apply ``other`` (expressed in this pose's frame)."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(self.x + c * other.x - s * other.y,
                      self.y + s * other.x + c * other.y,
                      self.theta + other.theta)

    def inverse(self) -> "Pose2D":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(-c * self.x - s * self.y, s * self.x - c * self.y, -self.theta)

    def relative_to(self, frame: "Pose2D") -> "Pose2D":
        """This pose expressed in ``frame``."""
        return frame.inverse().compose(self)

    def translated(self, dx: float, dy: float) -> "Pose2D":
        return Pose2D(self.x + dx, self.y + dy, self.theta)

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def close_to(self, other: "Pose2D", pos_tol: float = 1e-6, ang_tol: float = 1e-6) -> bool:
        return self.distance_to(other) <= pos_tol and angle_diff(self.theta, other.theta) <= ang_tol


def transform_points(points: np.ndarray, pose: Pose2D) -> np.ndarray:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    rot = np.array([[c, -s], [s, c]])
    return points @ rot.T + np.array([pose.x, pose.y])


def polygon_area(poly: np.ndarray) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _is_convex_ccw(poly: np.ndarray) -> bool:
    n = len(poly)
    for i in range(n):
        a, b, c = poly[i], poly[(i + 1) % n], poly[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross <= 0.0:
            return False
    return True


@dataclass(frozen=True)
class Face:
    midpoint: tuple[float, float]
    normal: tuple[float, float]  # outward, unit length
    length: float


@dataclass(frozen=True, eq=False)
class Footprint:
    """Convex polygon in the body frame, vertices counter-clockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("footprint needs at least 3 two-dimensional vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("footprint vertices must be finite")
        if not _is_convex_ccw(v):
            raise ValueError("footprint must be a strictly convex, counter-clockwise polygon")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __eq__(self, other):
        return isinstance(other, Footprint) and self.vertices.shape == other.vertices.shape \
            and bool(np.all(self.vertices == other.vertices))

    def __hash__(self):
        return hash(self.vertices.tobytes())

    @classmethod
    def square(cls, side: float) -> "Footprint":
        h = side / 2.0
        return cls(np.array([[-h, -h], [h, -h], [h, h], [-h, h]]))

    @classmethod
    def rectangle(cls, xmin: float, xmax: float, ymin: float, ymax: float) -> "Footprint":
        return cls(np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]))

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    @property
    def radius(self) -> float:
        """Bounding radius about the body origin."""
        return float(np.max(np.hypot(self.vertices[:, 0], self.vertices[:, 1])))

    def faces(self) -> list[Face]:
        cached = self.__dict__.get("_faces")
        if cached is not None:
            return list(cached)
        out = []
        v = self.vertices
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            e = b - a
            length = float(math.hypot(e[0], e[1]))
            out.append(Face(((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0),
                            (e[1] / length, -e[0] / length), length))
        self.__dict__["_faces"] = tuple(out)
        return out

    def inflated(self, margin: float) -> "Footprint":
        """Offset every edge outward by ``margin`` (mitered corners)."""
        if margin <= 0.0:
            return self
        normals = np.array([f.normal for f in self.faces()])
        prev = np.roll(normals, 1, axis=0)
        denom = 1.0 + np.sum(prev * normals, axis=1)
        offs = (prev + normals) * (margin / denom)[:, None]
        return Footprint(self.vertices + offs)

    def symmetry_angles(self, tol: float = 1e-9) -> list[float]:
        """Rotations in [0, 2pi) about the body origin mapping the polygon onto itself."""
        key = ("_sym", tol)
        if key in self.__dict__:
            return list(self.__dict__[key])
        v = self.vertices
        angles = [0.0]
        n = len(v)
        r0 = math.atan2(v[0, 1], v[0, 0])
        for k in range(1, n):
            ang = (math.atan2(v[k, 1], v[k, 0]) - r0) % TWO_PI
            rot = transform_points(v, Pose2D(0.0, 0.0, ang))
            if np.allclose(np.roll(rot, k, axis=0), v, atol=tol):
                angles.append(ang)
        self.__dict__[key] = tuple(sorted(angles))
        return sorted(angles)


def footprint_at(spec: Footprint, pose: Pose2D) -> np.ndarray:
    """World-frame polygon of a footprint placed at ``pose``."""
    return transform_points(spec.vertices, pose)


def _axes(poly: np.ndarray) -> np.ndarray:
    e = np.roll(poly, -1, axis=0) - poly
    n = np.stack([e[:, 1], -e[:, 0]], axis=1)
    lens = np.hypot(n[:, 0], n[:, 1])
    return n[lens > 0] / lens[lens > 0, None]


def collides(a: np.ndarray, b: np.ndarray, tol: float = CONTACT_TOL) -> bool:
    """True iff the interiors of two convex polygons overlap by more than ``tol``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for axis in np.vstack([_axes(a), _axes(b)]):
        pa = a @ axis
        pb = b @ axis
        if pa.max() <= pb.min() + tol or pb.max() <= pa.min() + tol:
            return False
    return True


@dataclass(frozen=True)
class Workspace:
    width: float
    height: float
    origin: tuple[float, float] = (0.0, 0.0)
    grid_resolution: float = 0.1

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0 and self.grid_resolution > 0):
            raise ValueError("workspace width, height and grid_resolution must be positive")
        if self.grid_resolution > min(self.width, self.height) / 10.0 + 1e-12:
            raise ValueError("grid_resolution must be at most min(width, height)/10")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return (x0, y0, x0 + self.width, y0 + self.height)

    def contains(self, other: "Workspace") -> bool:
        ax0, ay0, ax1, ay1 = self.bounds
        bx0, by0, bx1, by1 = other.bounds
        return ax0 <= bx0 and ay0 <= by0 and ax1 >= bx1 and ay1 >= by1


def within_bounds(poly: np.ndarray, w: Workspace, tol: float = CONTACT_TOL) -> bool:
    """True iff every vertex lies in the closed workspace rectangle."""
    poly = np.asarray(poly, dtype=float)
    x0, y0, x1, y1 = w.bounds
    return bool(np.all(poly[:, 0] >= x0 - tol) and np.all(poly[:, 0] <= x1 + tol)
                and np.all(poly[:, 1] >= y0 - tol) and np.all(poly[:, 1] <= y1 + tol))


@dataclass(frozen=True)
class ObjectSpec:
    id: int
    footprint: Footprint
    start: Pose2D
    goal: Pose2D
    mass: float = 0.44

    def at(self, pose: Pose2D) -> "ObjectSpec":
        return ObjectSpec(self.id, self.footprint, pose, self.goal, self.mass)


def pose_error(footprint: Footprint, actual: Pose2D, target: Pose2D) -> tuple[float, float]:
    """Position and heading error, heading taken modulo the footprint's symmetry."""
    dpos = actual.distance_to(target)
    dang = min(angle_diff(actual.theta, target.theta + a) for a in footprint.symmetry_angles())
    return dpos, dang


@dataclass
class Scene:
    """Static obstacle polygons packed for the batch collision kernel."""

    polygons: list[np.ndarray] = field(default_factory=list)
    clearance: float = 0.0  # every polygon is grown at least this much beyond the true outline

    def __post_init__(self):
        self.polygons = [np.asarray(p, dtype=float) for p in self.polygons]
        if self.polygons:
            self.verts = np.ascontiguousarray(np.vstack(self.polygons))
            self.offsets = np.cumsum([0] + [len(p) for p in self.polygons]).astype(np.int64)
            circ = []
            for p in self.polygons:
                c = p.mean(axis=0)
                circ.append((c[0], c[1], float(np.max(np.hypot(*(p - c).T)))))
            self.circles = np.array(circ, dtype=float)
        else:
            self.verts = np.zeros((0, 2))
            self.offsets = np.zeros(1, dtype=np.int64)
            self.circles = np.zeros((0, 3))

    def __len__(self):
        return len(self.polygons)

    def with_polygons(self, extra: Iterable[np.ndarray]) -> "Scene":
        return Scene(self.polygons + [np.asarray(p, dtype=float) for p in extra])


@dataclass(frozen=True, eq=False)
class Body:
    """Rigid union of convex footprints sharing one reference frame."""

    parts: tuple[Footprint, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "verts", np.ascontiguousarray(np.vstack([p.vertices for p in parts])))
        object.__setattr__(self, "offsets",
                           np.cumsum([0] + [len(p.vertices) for p in parts]).astype(np.int64))
        object.__setattr__(self, "radius", max(p.radius for p in parts))

    @classmethod
    def of(cls, shape: "Footprint | Body | Sequence[Footprint]") -> "Body":
        if isinstance(shape, Body):
            return shape
        if isinstance(shape, Footprint):
            return cls((shape,))
        return cls(tuple(shape))

    def polygons_at(self, pose: Pose2D) -> list[np.ndarray]:
        return [footprint_at(p, pose) for p in self.parts]


def sweep_status(poses: np.ndarray, body: Body, scene: Scene, w: Workspace,
                 tol: float = CONTACT_TOL) -> int:
    """0 if the body is free at every pose, 1 on collision, 2 if it leaves the workspace."""
    from . import _kernels

    x0, y0, x1, y1 = w.bounds
    return int(_kernels.check_poses(np.ascontiguousarray(poses, dtype=float), body.verts, body.offsets,
                                    body.radius, scene.verts, scene.offsets, scene.circles,
                                    x0, y0, x1, y1, tol))
