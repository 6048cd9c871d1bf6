"""Mutable-by-copy snapshot of where every object currently sits."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .geometry import Footprint, ObjectSpec, Pose2D, Scene, Workspace, footprint_at
from .robot import CarModel

DEFAULT_INFLATION = 0.02


@dataclass
class World:
    """Objects still to be placed (``start`` is their current pose) plus frozen ones."""

    workspace: Workspace
    car: CarModel
    objects: dict[int, ObjectSpec]
    fixed: dict[int, tuple[Footprint, Pose2D]] = field(default_factory=dict)
    inflation: float = DEFAULT_INFLATION
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def footprints(self) -> dict[int, tuple[Footprint, Pose2D]]:
        out = {oid: (o.footprint, o.start) for oid, o in self.objects.items()}
        out.update(self.fixed)
        return out

    def layout(self) -> tuple:
        """Hashable summary of every object's shape and pose."""
        return tuple((oid, hash(fp), pose.as_tuple()) for oid, (fp, pose) in sorted(self.footprints().items()))

    def pose_of(self, oid: int) -> Pose2D:
        if oid in self.objects:
            return self.objects[oid].start
        return self.fixed[oid][1]

    def scene(self, exclude=(), raw=(), raw_margin: float = 0.0) -> Scene:
        """Obstacle polygons of every object not in ``exclude``.

        Objects listed in ``raw`` are grown by ``raw_margin`` only (true outline
        by default); the rest are inflated by the world's inflation.
        """
        key = (frozenset(exclude), frozenset(raw), raw_margin)
        hit = self._cache.get(key)
        if hit is None:
            polys, margins = [], []
            for oid, (fp, pose) in sorted(self.footprints().items()):
                if oid in key[0]:
                    continue
                if oid in key[1]:
                    shape = fp.inflated(raw_margin) if raw_margin > 0 else fp
                    margins.append(max(raw_margin, 0.0))
                else:
                    shape = fp.inflated(self.inflation)
                    margins.append(self.inflation)
                polys.append(footprint_at(shape, pose))
            hit = self._cache[key] = Scene(polys, min(margins, default=0.0))
        return hit

    def moved(self, oid: int, pose: Pose2D) -> "World":
        objects = dict(self.objects)
        objects[oid] = objects[oid].at(pose)
        return replace(self, objects=objects, _cache={})

    def placed(self, oid: int, pose: Pose2D) -> "World":
        objects = dict(self.objects)
        spec = objects.pop(oid)
        fixed = dict(self.fixed)
        fixed[oid] = (spec.footprint, pose)
        return replace(self, objects=objects, fixed=fixed, _cache={})
