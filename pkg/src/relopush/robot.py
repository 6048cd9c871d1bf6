"""The pusher: simple-car body geometry and bumper/object contact frames."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Body, Footprint, Pose2D, transform_points


@dataclass(frozen=True)
class CarModel:
    """Rear-axle simple car with a flat front bumper.

    The reference point is the rear-axle centre; ``front`` is the distance from
    it to the bumper face.
    """

    wheelbase: float = 0.29
    length: float = 0.40
    width: float = 0.22
    bumper_width: float = 0.15
    rho_push: float = 0.5
    rho_free: float | None = None
    body_footprint: Footprint = field(init=False)

    def __post_init__(self):
        if self.rho_free is None:
            object.__setattr__(self, "rho_free", self.rho_push)
        if not (0 < self.rho_free <= self.rho_push):
            raise ValueError("need 0 < rho_free <= rho_push")
        if not (0 < self.wheelbase < self.length):
            raise ValueError("wheelbase must be positive and shorter than the body")
        if not (0 < self.bumper_width <= self.width):
            raise ValueError("bumper_width must be positive and at most the body width")
        rear = (self.length - self.wheelbase) / 2.0
        object.__setattr__(self, "body_footprint", Footprint.rectangle(
            -rear, self.length - rear, -self.width / 2.0, self.width / 2.0))

    @property
    def front(self) -> float:
        return self.length - (self.length - self.wheelbase) / 2.0

    @property
    def max_steer(self) -> float:
        return math.atan(self.wheelbase / self.rho_free)

    @property
    def body(self) -> Body:
        return Body((self.body_footprint,))


def pushable_sides(car: CarModel, footprint: Footprint) -> list[int]:
    """Faces wide enough for the bumper."""
    return [k for k, f in enumerate(footprint.faces()) if f.length >= car.bumper_width - 1e-9]


def pushing_pose(car: CarModel, footprint: Footprint, object_pose: Pose2D, side: int) -> Pose2D:
    """Robot pose with the bumper centred flush on face ``side``, heading into the face."""
    face = footprint.faces()[side]
    c, s = math.cos(object_pose.theta), math.sin(object_pose.theta)
    mx = object_pose.x + c * face.midpoint[0] - s * face.midpoint[1]
    my = object_pose.y + s * face.midpoint[0] + c * face.midpoint[1]
    nx = c * face.normal[0] - s * face.normal[1]
    ny = s * face.normal[0] + c * face.normal[1]
    return Pose2D(mx + nx * car.front, my + ny * car.front, math.atan2(-ny, -nx))


def push_direction(footprint: Footprint, object_pose: Pose2D, side: int) -> tuple[float, float]:
    """World unit vector the object moves along when pushed on face ``side``."""
    n = footprint.faces()[side].normal
    c, s = math.cos(object_pose.theta), math.sin(object_pose.theta)
    return (-(c * n[0] - s * n[1]), -(s * n[0] + c * n[1]))


def contact_transform(car: CarModel, footprint: Footprint, side: int) -> Pose2D:
    """Object frame expressed in the robot frame while pushing on ``side``."""
    origin = Pose2D(0.0, 0.0, 0.0)
    return origin.relative_to(pushing_pose(car, footprint, origin, side))


def pushing_body(car: CarModel, footprint: Footprint, side: int) -> Body:
    """Robot body plus the object held ahead of the bumper."""
    rel = contact_transform(car, footprint, side)
    held = Footprint(np.ascontiguousarray(transform_points(footprint.vertices, rel)))
    return Body((car.body_footprint, held))
