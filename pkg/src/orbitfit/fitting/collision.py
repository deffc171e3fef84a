"""Plate-into-bone collision detection by signed vertex distance."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..geometry import SpatialIndex, TriangleMesh


class NonWatertightBoneWarning(UserWarning):
    """Bone surface is not closed; inside/outside comes from the
    pseudonormal sign and may be unreliable near holes."""


@dataclass(frozen=True)
class CollisionReport:
    collision_count: int
    total_points: int
    percent: float                      # 100*count/total rounded to 2 decimals
    collision_points: tuple = field(repr=False, default=())

    @property
    def percent_text(self) -> str:
        return f"{self.percent:.2f}"

    def message(self) -> str:
        return (
            f"There are {self.collision_count} collision points. This is "
            f"approximately {self.percent_text} % of points in the plate."
        )


def check_bone_for_collisions(bone: TriangleMesh) -> bool:
    """Watertightness gate used at case load; non-watertight bones are
    allowed with a warning (signed-distance sign still applies)."""
    if not bone.is_watertight():
        warnings.warn(
            "bone mesh is not watertight; collision classification uses "
            "the pseudonormal sign only",
            NonWatertightBoneWarning,
        )
        return False
    return True


def detect_collisions(plate_mesh: TriangleMesh, bone_index: SpatialIndex,
                      penetration_tol: float = 0.0, transform=None) -> CollisionReport:
    """A plate vertex collides when its signed distance to the bone
    surface is below -penetration_tol (i.e. inside the bone)."""
    points = plate_mesh.vertices if transform is None else transform.apply(plate_mesh.vertices)
    signed = bone_index.signed_distances(points)
    ids = np.nonzero(signed < -penetration_tol)[0]
    total = len(points)
    percent = round(100.0 * len(ids) / total, 2)
    return CollisionReport(
        collision_count=int(len(ids)),
        total_points=int(total),
        percent=percent,
        collision_points=tuple(int(i) for i in ids),
    )
