"""Geometric substrate: meshes, transforms, landmarks, curves, queries."""

from .landmarks import LandmarkSet, load_landmarks, save_landmarks
from .mesh import TriangleMesh, apply_transform, mirror_mesh
from .meshio import (
    MeshCleaningWarning,
    load_mesh,
    load_scalars,
    save_mesh,
    save_mesh_with_scalars,
    save_stl_binary,
)
from .polyline import Polyline, load_polyline, resample_polyline, save_polyline
from .spatial import ClosestPointResult, SpatialIndex, build_spatial_index, closest_point
from .transforms import AffineTransform, MirrorPlane, RigidTransform

__all__ = [
    "AffineTransform",
    "ClosestPointResult",
    "LandmarkSet",
    "MeshCleaningWarning",
    "MirrorPlane",
    "Polyline",
    "RigidTransform",
    "SpatialIndex",
    "TriangleMesh",
    "apply_transform",
    "build_spatial_index",
    "closest_point",
    "load_landmarks",
    "load_mesh",
    "load_polyline",
    "load_scalars",
    "mirror_mesh",
    "resample_polyline",
    "save_landmarks",
    "save_mesh",
    "save_mesh_with_scalars",
    "save_polyline",
    "save_stl_binary",
]
